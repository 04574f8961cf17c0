"""Jump matrices, diagonal gauges, Hermitian witnesses, chain/tree
determinants, and the positivity certificate."""

import cmath
import math

import numpy as np
import pytest

from ttstar import cartan, jumps
from ttstar.errors import ContourViolation, ModulusViolation
from ttstar.geometry import Spectrum, choose_delta
from ttstar.jumps import JumpData


def minus_ray_point(delta, r=1.3):
    return r * cmath.exp(1j * (-math.pi + delta / 2))


def plus_ray_point(delta, r=0.7):
    return r * cmath.exp(1j * delta / 2)


def test_identity_jumps(cube_spec):
    delta = choose_delta(cube_spec)
    g_minus, g_plus = jumps.jump_matrices(
        cube_spec, np.eye(3), 1.0, delta, minus_ray_point(delta))
    assert np.allclose(g_minus, np.eye(3)) and np.allclose(g_plus, np.eye(3))


def test_contour_violation(cube_spec, sa3):
    delta = choose_delta(cube_spec)
    jd = JumpData(cube_spec, sa3, 1.0, delta)
    with pytest.raises(ContourViolation):
        jd.jump(1.0j)


def test_unit_determinant(cube_spec, sa3):
    delta = choose_delta(cube_spec)
    jd = JumpData(cube_spec, sa3, 0.8, delta)
    for mu in (minus_ray_point(delta, 0.4), minus_ray_point(delta, 2.2),
               plus_ray_point(delta, 1.7)):
        assert abs(np.linalg.det(jd.g_minus(mu)) - 1) < 1e-12
        assert abs(np.linalg.det(jd.g_plus(mu)) - 1) < 1e-12
        assert np.allclose(jd.g_plus_inv(mu) @ jd.g_plus(mu), np.eye(3),
                           atol=1e-12)


def test_offdiagonal_decay(sa2):
    spec = Spectrum((1, -1))
    delta = choose_delta(spec)
    jd = JumpData(spec, sa2, 1.0, delta)
    for r in np.logspace(-1, 1, 9):
        mu = minus_ray_point(delta, r)
        assert abs(jd.g_minus(mu)[0, 1]) < 1.0


def test_decay_envelope(cube_spec, sa3):
    delta = choose_delta(cube_spec)
    rates = jumps.pair_decay(cube_spec, delta)
    assert min(rates.values()) > 0
    jd = JumpData(cube_spec, sa3, 1.0, delta)
    for (j, l), g in rates.items():
        for r in (0.05, 1.0, 20.0):
            mu = minus_ray_point(delta, r)
            envelope = math.exp(-1.0 * g * (1 / r + r))
            assert abs(jd.g_minus(mu)[j - 1, l - 1]) <= envelope + 1e-12


def test_gauge_transform(cube_spec, sa3):
    delta = choose_delta(cube_spec)
    jd = JumpData(cube_spec, sa3, 1.0, delta)
    same = jumps.gauge_transform(jd, (0.0, 0.0, 0.0))
    mu = minus_ray_point(delta)
    assert np.allclose(same.g_minus(mu), jd.g_minus(mu))
    beta = (0.3, -0.1, 0.5)
    gt = jumps.gauge_transform(jd, beta)
    # T^-1 G T with T = diag(exp(i w beta_j)), w real on the contour
    w = (cmath.exp(0.5j * delta) / mu - cmath.exp(-0.5j * delta) * mu) * jd.x
    assert abs(w.imag) < 1e-12
    t = np.diag(np.exp(1j * w * np.array(beta)))
    expected = np.linalg.inv(t) @ jd.g_minus(mu) @ t
    assert np.allclose(gt.g_minus(mu), expected, atol=1e-12)
    # gauge is unimodular on the rays: moduli unchanged
    assert np.allclose(np.abs(gt.g_minus(mu)), np.abs(jd.g_minus(mu)))


def test_hermitian_witness_identity(cube_spec):
    delta = choose_delta(cube_spec)
    jd = JumpData(cube_spec, np.eye(3), 1.0, delta)
    wit = jumps.hermitian_witness(jd, minus_ray_point(delta))
    assert np.allclose(wit.matrix, 2 * np.eye(3))
    assert wit.min_eigenvalue == pytest.approx(2.0)
    assert wit.cholesky_ok


def test_hermitian_witness_chain(cube_spec, sa3):
    delta = choose_delta(cube_spec)
    for x in (0.05, 1.0, 10.0):
        jd = JumpData(cube_spec, sa3, x, delta)
        for r in np.logspace(-1.5, 1.5, 7):
            for mu in (minus_ray_point(delta, r), plus_ray_point(delta, r)):
                wit = jumps.hermitian_witness(jd, mu)
                assert wit.hermiticity < 1e-13
                assert wit.min_eigenvalue > 0 and wit.cholesky_ok


def test_an_chain_determinants():
    assert jumps.an_chain_determinants([0, 0, 0]) == [2.0, 4.0, 8.0, 16.0]
    assert jumps.an_chain_determinants([0.5])[-1] == pytest.approx(3.75)
    # boundary case reproduces the A_n Cartan determinants 2, 3, ..., n+1
    dets = jumps.an_chain_determinants([1.0] * 7, allow_boundary=True)
    assert dets == pytest.approx(list(range(2, 10)))
    with pytest.raises(ModulusViolation):
        jumps.an_chain_determinants([0.2, 1.0])


def test_chain_increasing_random():
    rng = np.random.default_rng(3)
    for _ in range(200):
        n = int(rng.integers(1, 13))
        a = rng.uniform(0, 1, size=n) * np.exp(2j * math.pi
                                               * rng.uniform(size=n))
        a *= 0.999
        dets = jumps.an_chain_determinants(list(a))
        assert all(d > 0 for d in dets)
        assert all(b > a_ for a_, b in zip(dets, dets[1:]))


def test_f_eval():
    # one edge value per Dynkin edge: rank - 1 of them
    assert jumps.f_eval("E6", [0.0] * 5) == pytest.approx(64.0)
    assert jumps.f_eval("E7", [0.0] * 6) == pytest.approx(128.0)
    # Cartan sign pattern saturates the minimum
    assert jumps.f_eval("E8", [-1.0] * 7) == pytest.approx(1.0)
    assert jumps.f_eval("E6", [1.0] * 5) == pytest.approx(3.0)
    # tree structure: determinant depends only on |e_k|
    rng = np.random.default_rng(9)
    for _ in range(20):
        e = rng.uniform(-1, 1, size=6)
        signs = rng.choice([1.0, -1.0], size=6)
        assert jumps.f_eval("E7", e * signs) == pytest.approx(
            jumps.f_eval("E7", np.abs(e)))


def test_f_minimize_quick():
    out = jumps.f_minimize("E6", scan_samples=500, seed=1)
    assert out["min"] == pytest.approx(3.0, abs=1e-9)
    assert out["attained_on_boundary"]


def test_positivity_certificate_analytic(cube_spec, sa3):
    rep = jumps.positivity_certificate(cube_spec, sa3)
    assert rep.verdict == jumps.VERDICT_ANALYTIC and rep.certified
    rep_d5 = jumps.positivity_certificate(
        Spectrum((2.0, 1.0, 0.0, -1.0, -2.0)), cartan.cartan_seed("D", 5))
    assert rep_d5.verdict == jumps.VERDICT_ANALYTIC
    rep_i = jumps.positivity_certificate(cube_spec, np.eye(3))
    assert rep_i.verdict == jumps.VERDICT_ANALYTIC


def test_positivity_certificate_sampled_and_refuted(cube_spec):
    # non-ADE support (triangle) with small entries: sampled route
    s = np.array([[1, -0.2, -0.2], [0, 1, -0.2], [0, 0, 1.0]])
    rep = jumps.positivity_certificate(cube_spec, s, mu_samples=8)
    assert rep.verdict == jumps.VERDICT_SAMPLED and rep.certified
    bad = np.array([[1, -3.0], [0, 1]])
    rep_bad = jumps.positivity_certificate(Spectrum((1, -1)), bad)
    assert rep_bad.verdict == jumps.VERDICT_REFUTED and not rep_bad.certified
    rep_inc = jumps.positivity_certificate(Spectrum((1, -1)), bad,
                                           analytic_only=True)
    assert rep_inc.verdict == jumps.VERDICT_INCONCLUSIVE

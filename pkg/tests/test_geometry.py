"""Stokes-ray geometry: ray angles, separating order, admissibility,
contour half-angle, and ray-crossing sequences."""

import cmath
import math

import numpy as np
import pytest

from ttstar import geometry
from ttstar.errors import DegenerateSpectrum, NoAdmissibleDelta, RayCollision
from ttstar.geometry import Spectrum

OMEGA = cmath.exp(2j * cmath.pi / 3)


def test_degenerate_spectrum_rejected():
    with pytest.raises(DegenerateSpectrum):
        Spectrum((1.0, 1.0, 2.0))


def test_pair_angle_cube_roots(cube_spec):
    # arg(1 - omega) = -pi/6, minus pi/2
    assert geometry.pair_angle(cube_spec, 1, 2) == pytest.approx(
        -2 * math.pi / 3, abs=1e-12)


def test_two_point_rays():
    arr = geometry.stokes_rays(Spectrum((1, -1)))
    assert arr.m == 1
    assert [(r.pair, round(r.angle, 12)) for r in arr.rays] == [
        ((1, 2), round(-math.pi / 2, 12)),
        ((2, 1), round(math.pi / 2, 12)),
    ]


def test_cube_roots_arrangement(cube_spec):
    arr = geometry.stokes_rays(cube_spec)
    assert len(arr.rays) == 6 and arr.m == 3 and arr.n == 3
    angles = sorted(r.angle for r in arr.rays)
    gaps = np.diff(angles)
    assert np.allclose(gaps, math.pi / 3, atol=1e-12)
    # separating order starts from the first ray at/below the positive
    # real axis and proceeds by ascending theta = -arg
    assert np.allclose(arr.thetas,
                       [k * math.pi / 3 for k in range(6)], atol=1e-12)
    assert [r.pair for r in arr.separating] == [
        (2, 3), (1, 3), (1, 2), (3, 2), (3, 1), (2, 1)]
    # opposite rays carry swapped labels and differ by pi
    by_pair = {r.pair: r.angle for r in arr.rays}
    for (j, l), ang in by_pair.items():
        assert abs(abs(ang - by_pair[(l, j)]) - math.pi) < 1e-12
    # R_1 is labeled by an adjacent pair (j, j+1)
    j, l = arr.separating[0].pair
    assert l == j + 1


def test_rays_with_j_less_l_lie_below_axis(cube_spec):
    for r in geometry.stokes_rays(cube_spec).rays:
        if r.pair[0] < r.pair[1]:
            assert -math.pi < r.angle <= 0.0


def test_rotation_equivariance(cube_spec):
    phi = 0.3
    base = geometry.stokes_rays(cube_spec)
    rot = geometry.stokes_rays(cube_spec.rotated(phi))
    for pair in [(1, 2), (2, 3), (3, 1)]:
        a0 = next(r.angle for r in base.rays if r.pair == pair)
        a1 = next(r.angle for r in rot.rays if r.pair == pair)
        diff = (a1 - a0 - phi) % (2 * math.pi)
        assert min(diff, 2 * math.pi - diff) < 1e-12


def test_check_pd():
    assert geometry.check_pd(Spectrum((0, 1, 2))) is False  # collinear
    assert geometry.check_pd(Spectrum((1, OMEGA, OMEGA ** 2))) is True
    assert geometry.check_pd(Spectrum((0, 1))) is True


def test_admissible_order():
    assert geometry.admissible_order(Spectrum((-1, 1)), 0.1) == (1, 0)
    assert geometry.admissible_order(Spectrum((1, -1)), 0.1) == (0, 1)
    # equal real parts: larger imaginary part first
    assert geometry.admissible_order(Spectrum((1j, -1j)), 0.3) == (0, 1)
    with pytest.raises(NoAdmissibleDelta):
        geometry.admissible_order(Spectrum((1, -1)), 2.0)


def test_choose_delta():
    assert geometry.choose_delta(Spectrum((1, -1))) == pytest.approx(
        math.pi / 4)
    assert geometry.choose_delta(Spectrum((0.7,))) == pytest.approx(
        math.pi / 4)


def test_choose_delta_feasible_for_cube_roots(cube_spec):
    from ttstar.jumps import pair_decay
    delta = geometry.choose_delta(cube_spec)
    assert 0 < delta < math.pi / 2
    # every ordered pair j < l must decay on the contour
    assert min(pair_decay(cube_spec, delta).values()) > 0


def test_is_admissible(cube_spec):
    assert geometry.is_admissible(cube_spec) is True
    assert geometry.is_admissible(Spectrum((-1, 1))) is False


def test_crossing_sequence_two_point():
    assert geometry.crossing_sequence(Spectrum((1, -1)), 2 * math.pi) == (1, 1)


def test_crossing_sequence_cube_roots(cube_spec):
    seq = geometry.crossing_sequence(cube_spec, 2 * math.pi)
    assert seq == (2, 1, 2, 1, 2, 1)
    assert len(seq) == 6  # 2m entries on a full turn


def test_crossing_sequence_short_rotation(cube_spec):
    # stop before the second separating ray (theta_2 = pi/3)
    seq = geometry.crossing_sequence(cube_spec, math.pi / 6)
    assert seq == (2,)


def test_crossing_sequence_ray_collision(cube_spec):
    with pytest.raises(RayCollision):
        geometry.crossing_sequence(cube_spec, math.pi / 3)


def test_crossing_sequence_rejects_bad_phi(cube_spec):
    with pytest.raises(ValueError):
        geometry.crossing_sequence(cube_spec, 0.0)

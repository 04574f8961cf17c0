"""Random generators shared by the braid and acceptance tests."""

from ttstar import exact, geometry
from ttstar.geometry import Spectrum


def rand_unitriangular(rng, n, lo=-3, hi=3):
    rows = [[1 if i == j else (int(rng.integers(lo, hi + 1)) if j > i else 0)
             for j in range(n)] for i in range(n)]
    return exact.as_matrix(rows)


def rand_pd_spectrum(rng, n):
    """Random admissible spectrum with pairwise-distinct rays."""
    while True:
        u = rng.normal(size=n) + 1j * rng.normal(size=n)
        try:
            spec = Spectrum(tuple(u))
            delta = geometry.choose_delta(spec.permuted(
                geometry.admissible_order(spec, 0.1)))
        except Exception:
            continue
        spec = spec.permuted(geometry.admissible_order(spec, delta))
        if geometry.check_pd(spec, tol_angle=1e-9) \
                and geometry.is_admissible(spec):
            return spec

"""ADE seed catalog, symmetrization, matching, and bounded detection."""

from fractions import Fraction

import pytest

from ttstar import braid, cartan, exact
from ttstar.errors import InvalidRank


def exact_det(m):
    # det = (-1)^n * p(0) for the monic characteristic polynomial
    coeffs = exact.charpoly(m)
    n = len(m)
    return (-1) ** n * coeffs[-1]


def test_seed_low_rank_displays():
    assert cartan.cartan_seed("A", 2) == exact.as_matrix(
        [[1, -1], [0, 1]])
    assert cartan.cartan_seed("A", 1) == exact.identity(1)
    d4 = cartan.cartan_seed("D", 4)
    assert d4 == exact.as_matrix([[1, -1, 0, 0],
                                  [0, 1, -1, -1],
                                  [0, 0, 1, 0],
                                  [0, 0, 0, 1]])
    e6 = cartan.cartan_seed("E", 6)
    assert e6[2][5] == Fraction(-1) and e6[2][4] == Fraction(0)
    assert e6[3][4] == Fraction(-1)


def test_invalid_ranks():
    for family, rank in [("D", 3), ("E", 5), ("E", 9), ("A", 0), ("F", 4)]:
        with pytest.raises(InvalidRank):
            cartan.cartan_seed(family, rank)


def test_symmetrize(sa2):
    assert cartan.symmetrize(sa2) == exact.as_matrix([[2, -1], [-1, 2]])
    assert cartan.symmetrize(exact.identity(3)) == exact.as_matrix(
        [[2, 0, 0], [0, 2, 0], [0, 0, 2]])


def test_cartan_determinants():
    for n in range(1, 11):
        m = cartan.symmetrize(cartan.cartan_seed("A", n))
        assert exact_det(m) == n + 1
    for n in range(4, 11):
        m = cartan.symmetrize(cartan.cartan_seed("D", n))
        assert exact_det(m) == 4
    for rank, det in [(6, 3), (7, 2), (8, 1)]:
        m = cartan.symmetrize(cartan.cartan_seed("E", rank))
        assert exact_det(m) == det


def test_match_cartan():
    for family, rank in [("A", 3), ("A", 8), ("D", 5), ("E", 6), ("E", 7),
                         ("E", 8)]:
        m = cartan.symmetrize(cartan.cartan_seed(family, rank))
        assert cartan.match_cartan(m) == (family, rank)
    # disconnected diagram: 2I is A1 + A1, not a single type
    two_eye = exact.as_matrix([[2, 0], [0, 2]])
    assert cartan.match_cartan(two_eye) is None
    assert cartan.classify_forest(two_eye) == (("A", 1), ("A", 1))


def test_match_cartan_permutation_flag():
    m = cartan.symmetrize(cartan.cartan_seed("A", 3))
    perm = (2, 0, 1)
    permuted = tuple(tuple(m[i][j] for j in perm) for i in perm)
    assert cartan.match_cartan(permuted) is None
    assert cartan.match_cartan(permuted, up_to_permutation=True) == ("A", 3)


def test_classify_forest_rejects_non_ade():
    # triangle (affine A2): not a tree
    tri = exact.as_matrix([[2, -1, -1], [-1, 2, -1], [-1, -1, 2]])
    assert cartan.classify_forest(tri) is None
    # entries outside {0, -1}
    bad = exact.as_matrix([[2, -2], [-2, 2]])
    assert cartan.classify_forest(bad) is None


def test_detect_ade_seeds():
    for family, rank in [("A", 2), ("A", 5), ("D", 4), ("E", 6), ("E", 7),
                         ("E", 8)]:
        hit = cartan.detect_ade(cartan.cartan_seed(family, rank),
                                orbit_bound=0)
        assert hit == ((family, rank), ())


def test_detect_ade_sign_conjugates():
    seed = cartan.cartan_seed("D", 4)
    s = braid.sigma_eps(seed, (1, -1, 1, -1))
    hit = cartan.detect_ade(s, orbit_bound=1)
    assert hit is not None
    (family, rank), word = hit
    assert (family, rank) == ("D", 4) and len(word) == 1


def test_detect_ade_inconclusive():
    s = exact.as_matrix([[1, 5], [0, 1]])
    assert cartan.detect_ade(s, orbit_bound=3) is None

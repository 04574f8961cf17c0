"""Group action governing Stokes-matrix ambiguities: sign conjugations,
braid moves, full-turn words, Stokes-data sets, orbit search and U(1)
charges.  All generator applications are exact over the rationals."""

import cmath
from collections import deque
from fractions import Fraction
from itertools import product

import numpy as np

from . import exact
from .errors import NotUnitriangular
from .geometry import crossing_sequence

# Braid word generators: ("move", l) with 1 <= l <= n-1, or
# ("sign", (e_1, ..., e_n)) with entries +-1.


def unitriangular(rows):
    s = exact.as_matrix(rows)
    exact.check_unitriangular(s)
    return s


def sigma_eps(s, eps):
    """Sign conjugation S -> eps S eps."""
    n = len(s)
    if len(eps) != n:
        raise ValueError("sign vector length mismatch")
    if any(e * e != 1 for e in eps):
        raise ValueError("sign vector entries must be +-1")
    return tuple(
        tuple(Fraction(eps[i] * eps[j]) * s[i][j] for j in range(n))
        for i in range(n)
    )


def b_matrix(s, l):
    """The move matrix: identity with rows/cols l, l+1 replaced by the
    2x2 block [[0, 1], [1, -(S)_{l,l+1}]] (1-based l)."""
    n = len(s)
    if not 1 <= l <= n - 1:
        raise IndexError(f"move index l={l} outside 1..{n - 1}")
    b = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    k = l - 1
    b[k][k] = Fraction(0)
    b[k][k + 1] = Fraction(1)
    b[k + 1][k] = Fraction(1)
    b[k + 1][k + 1] = -s[k][k + 1]
    return tuple(tuple(row) for row in b)


def sigma_l(s, l):
    """Braid move S -> B_l(S) S B_l(S)."""
    b = b_matrix(s, l)
    out = exact.mat_mul(exact.mat_mul(b, s), b)
    if not exact.is_unitriangular(out):
        raise NotUnitriangular(f"sigma_{l} broke unitriangularity")
    return out


def apply_word(s, word):
    """Apply a braid word with the leftmost list entry acting first."""
    out = s
    for kind, arg in word:
        if kind == "move":
            out = sigma_l(out, arg)
        elif kind == "sign":
            out = sigma_eps(out, arg)
        else:
            raise ValueError(f"unknown generator kind {kind!r}")
    return out


def full_turn_word(spec, tol_angle=None):
    """The length-2m move word traced out by a full coordinate turn."""
    kwargs = {} if tol_angle is None else {"tol_angle": tol_angle}
    seq = crossing_sequence(spec, 2 * cmath.pi, **kwargs)
    return tuple(("move", l) for l in seq)


def _sign_vectors(n, include_identity=False):
    """Sign vectors up to the global sign (fix e_1 = +1)."""
    for tail in product((1, -1), repeat=n - 1):
        eps = (1,) + tail
        if include_identity or any(e == -1 for e in eps):
            yield eps


def stokes_data(s, spec):
    """The deduplicated set of Stokes matrices reachable by full-turn
    prefixes composed with sign conjugations, plus the raw count."""
    n = len(s)
    word = full_turn_word(spec)
    prefixes = []
    current = s
    for gen in word:
        current = apply_word(current, (gen,))
        prefixes.append(current)
    raw = 0
    seen = set()
    for mat in prefixes:
        for eps in _sign_vectors(n, include_identity=True):
            raw += 1  # eps and -eps act identically, so count one of each
            seen.add(sigma_eps(mat, eps))
    return frozenset(seen), raw


def charges(s):
    """Eigenvalues of M = S (S^-1)^t, sorted by argument then modulus."""
    inv_t = exact.transpose(exact.unitriangular_inverse(s))
    m = exact.to_numpy(exact.mat_mul(s, inv_t))
    vals = np.linalg.eigvals(m)
    return tuple(sorted(vals, key=lambda z: (cmath.phase(z), abs(z))))


def charge_polynomial(s):
    """Exact characteristic polynomial of S (S^-1)^t; a braid invariant."""
    inv_t = exact.transpose(exact.unitriangular_inverse(s))
    return exact.charpoly(exact.mat_mul(s, inv_t))


def _generators(n):
    gens = [("move", l) for l in range(1, n)]
    gens.extend(("sign", eps) for eps in _sign_vectors(n))
    return gens


def orbit_search(s, target, bound=8, max_nodes=200000):
    """Breadth-first search for a braid word w with apply_word(s, w) ==
    target.  Returns the word, or None if none is found within the depth
    bound (inconclusive, not a disproof)."""
    if len(s) != len(target):
        return None
    if s == target:
        return ()
    if charge_polynomial(s) != charge_polynomial(target):
        return None
    gens = _generators(len(s))
    seen = {s}
    frontier = deque([(s, ())])
    while frontier:
        mat, word = frontier.popleft()
        if len(word) >= bound:
            continue
        for gen in gens:
            nxt = apply_word(mat, (gen,))
            if nxt == target:
                return word + (gen,)
            if nxt not in seen:
                seen.add(nxt)
                if len(seen) > max_nodes:
                    return None
                frontier.append((nxt, word + (gen,)))
    return None

"""Exact rational matrix helpers used by the braid-action module.

Matrices are tuples of tuples of Fraction so they are immutable and
hashable (orbit searches key on them directly).
"""

from fractions import Fraction

import numpy as np

from .errors import NotUnitriangular

Matrix = tuple  # tuple of tuples of Fraction


def as_matrix(rows):
    """Coerce a nested iterable (ints, floats, strings, Fractions) to an
    exact matrix."""
    return tuple(tuple(Fraction(entry) for entry in row) for row in rows)


def identity(n):
    return tuple(
        tuple(Fraction(1) if i == j else Fraction(0) for j in range(n))
        for i in range(n)
    )


def mat_mul(a, b):
    n, k, m = len(a), len(b), len(b[0])
    assert len(a[0]) == k
    return tuple(
        tuple(sum(a[i][p] * b[p][j] for p in range(k)) for j in range(m))
        for i in range(n)
    )


def transpose(a):
    return tuple(zip(*a))


def is_unitriangular(a):
    n = len(a)
    for i in range(n):
        if a[i][i] != 1:
            return False
        for j in range(i):
            if a[i][j] != 0:
                return False
    return True


def check_unitriangular(a):
    if not is_unitriangular(a):
        raise NotUnitriangular(f"matrix is not upper unitriangular: {a}")
    return a


def unitriangular_inverse(a):
    """Inverse of I + N with N strictly upper triangular, via the
    terminating Neumann series I - N + N^2 - ..."""
    n = len(a)
    eye = identity(n)
    nil = tuple(
        tuple(a[i][j] - eye[i][j] for j in range(n)) for i in range(n)
    )
    out = eye
    power = eye
    sign = 1
    for _ in range(n - 1):
        power = mat_mul(power, nil)
        sign = -sign
        out = tuple(
            tuple(out[i][j] + sign * power[i][j] for j in range(n))
            for i in range(n)
        )
    return out


def charpoly(a):
    """Characteristic polynomial coefficients (monic, highest degree
    first) by the Faddeev-LeVerrier recursion, exact over Fractions."""
    n = len(a)
    coeffs = [Fraction(1)]
    m = identity(n)
    zero = tuple(tuple(Fraction(0) for _ in range(n)) for _ in range(n))
    mk = zero
    for k in range(1, n + 1):
        mk = mat_mul(a, m) if k > 1 else a
        tr = sum(mk[i][i] for i in range(n))
        c = -tr / k
        coeffs.append(c)
        m = tuple(
            tuple(mk[i][j] + (c if i == j else 0) for j in range(n))
            for i in range(n)
        )
    return tuple(coeffs)


def to_numpy(a, dtype=float):
    return np.array([[dtype(x) for x in row] for row in a])

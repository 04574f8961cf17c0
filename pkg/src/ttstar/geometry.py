"""Stokes-ray geometry: ray arrangements, admissible orderings, contour
half-angle selection, and ray-crossing sequences under rotation."""

import cmath
import math
from dataclasses import dataclass, field

from .errors import (
    DegenerateSpectrum,
    NoAdmissibleDelta,
    NonGenericRays,
    RayCollision,
)

TOL_ANGLE = 1e-12
TWO_PI = 2.0 * math.pi


def _wrap(angle):
    """Wrap to the canonical branch (-pi, pi]."""
    a = math.fmod(angle, TWO_PI)
    if a <= -math.pi:
        a += TWO_PI
    elif a > math.pi:
        a -= TWO_PI
    return a


@dataclass(frozen=True)
class Spectrum:
    """Pairwise-distinct eigenvalues of the diagonal Higgs matrix."""

    u: tuple

    def __post_init__(self):
        object.__setattr__(self, "u", tuple(complex(z) for z in self.u))
        scale = max(abs(z) for z in self.u) if self.u else 0.0
        floor = 1e-14 * max(scale, 1.0)
        for i in range(len(self.u)):
            for j in range(i + 1, len(self.u)):
                if abs(self.u[i] - self.u[j]) <= floor:
                    raise DegenerateSpectrum(
                        f"u[{i}] and u[{j}] coincide: {self.u[i]}"
                    )

    @property
    def n(self):
        return len(self.u)

    def rotated(self, phi):
        w = cmath.exp(1j * phi)
        return Spectrum(tuple(w * z for z in self.u))

    def permuted(self, perm):
        return Spectrum(tuple(self.u[p] for p in perm))


@dataclass(frozen=True)
class Ray:
    """One Stokes ray: canonical angle plus its 1-based ordered pair."""

    angle: float
    pair: tuple


@dataclass(frozen=True)
class RayArrangement:
    rays: tuple            # all n(n-1) rays, sorted by angle
    separating: tuple      # same rays in separating order R_1..R_{2m}
    thetas: tuple          # theta_k = -arg(R_k) mod 2pi, ascending
    m: int = field(default=0)

    @property
    def n(self):
        return int(round((1 + math.sqrt(1 + 8 * self.m)) / 2))


def pair_angle(spec, j, l):
    """Canonical angle of ray R_{jl} (1-based indices)."""
    return _wrap(cmath.phase(spec.u[j - 1] - spec.u[l - 1]) - math.pi / 2)


def stokes_rays(spec, strict_pd=False, tol_angle=TOL_ANGLE):
    """All labeled Stokes rays of a spectrum.

    Separating rays are numbered starting from the first one below the
    positive real axis and proceed clockwise, i.e. ascending in
    theta = -arg(R) mod 2pi.
    """
    n = spec.n
    rays = []
    for j in range(1, n + 1):
        for l in range(1, n + 1):
            if j != l:
                rays.append(Ray(pair_angle(spec, j, l), (j, l)))
    if strict_pd and not check_pd(spec, tol_angle=tol_angle):
        raise NonGenericRays("two Stokes rays coincide")
    ordered = tuple(sorted(rays, key=lambda r: r.angle))
    thetas = sorted((-r.angle) % TWO_PI for r in rays)
    separating = tuple(sorted(rays, key=lambda r: (-r.angle) % TWO_PI))
    m = n * (n - 1) // 2
    return RayArrangement(
        rays=ordered, separating=separating, thetas=tuple(thetas), m=m
    )


def check_pd(spec, tol_angle=TOL_ANGLE):
    """True iff all ordered-pair ray angles are distinct mod 2pi."""
    n = spec.n
    angles = sorted(
        pair_angle(spec, j, l)
        for j in range(1, n + 1)
        for l in range(1, n + 1)
        if j != l
    )
    if not angles:
        return True
    gaps = [b - a for a, b in zip(angles, angles[1:])]
    gaps.append(angles[0] + TWO_PI - angles[-1])
    return min(gaps) > tol_angle


def admissible_order(spec, delta, tol=1e-12):
    """Permutation (0-based) sorting u by real part descending, ties
    broken by imaginary part descending.

    This is the ordering that keeps Re[mu^-1 u] ascending for mu just
    off the positive real axis, so that every separating-ray crossing
    swaps an adjacent pair: the pair on a ray crossing the axis has
    exactly equal real parts.  Real parts within tol (relative to the
    spectrum scale) are treated as tied.
    """
    if not 0 < delta < math.pi / 2:
        raise NoAdmissibleDelta(f"delta={delta} outside (0, pi/2)")
    scale = max(1.0, max(abs(z) for z in spec.u))
    order = sorted(range(spec.n), key=lambda i: -spec.u[i].real)
    # regroup near-equal real parts and break ties by imaginary part
    out, k = [], 0
    while k < spec.n:
        group = [order[k]]
        while (k + 1 < spec.n
               and spec.u[order[k]].real - spec.u[order[k + 1]].real
               <= tol * scale):
            k += 1
            group.append(order[k])
        group.sort(key=lambda i: -spec.u[i].imag)
        out.extend(group)
        k += 1
    return tuple(out)


def feasible_delta_interval(spec):
    """Open interval of contour half-angles delta for which every jump
    entry decays: all rays R_{jl} (j < l) must lie strictly inside the
    open half-plane swept clockwise from the contour line at delta/2,
    i.e. cos(arg(u_j - u_l) - delta/2) > 0 for all j < l.
    """
    lo, hi = 0.0, math.pi / 2
    for j in range(1, spec.n + 1):
        for l in range(j + 1, spec.n + 1):
            psi = cmath.phase(spec.u[j - 1] - spec.u[l - 1])
            # cos(psi - delta/2) > 0  <=>  2*psi - pi < delta < 2*psi + pi
            lo = max(lo, 2 * psi - math.pi)
            hi = min(hi, 2 * psi + math.pi)
    return lo, hi


def choose_delta(spec):
    """Deterministic contour half-angle: midpoint of the feasible
    interval in (0, pi/2)."""
    if spec.n == 1:
        return math.pi / 4
    lo, hi = feasible_delta_interval(spec)
    if not lo < hi:
        raise NoAdmissibleDelta(
            "no delta in (0, pi/2) keeps all jump entries decaying; "
            "is the spectrum admissibly ordered?"
        )
    return 0.5 * (lo + hi)


def is_admissible(spec, delta=None):
    """True iff the identity ordering is admissible and a contour
    half-angle exists (checked for the given delta when supplied)."""
    try:
        d = delta if delta is not None else choose_delta(spec)
    except NoAdmissibleDelta:
        return False
    if admissible_order(spec, d) != tuple(range(spec.n)):
        return False
    if delta is not None:
        lo, hi = feasible_delta_interval(spec)
        return lo < delta < hi
    return True


def crossing_sequence(spec, phi, tol_angle=TOL_ANGLE):
    """Indices l_1..l_p of the adjacent transpositions triggered as the
    separating rays are crossed while rotating the coordinate by phi.

    Each entry is determined by the positions (l, l+1) that the ray's
    eigenvalue pair occupies in the ordering current at that crossing.
    """
    if not 0 < phi <= TWO_PI:
        raise ValueError(f"phi={phi} outside (0, 2*pi]")
    if not check_pd(spec, tol_angle=tol_angle):
        raise NonGenericRays("crossing sequence needs pairwise-distinct rays")
    arr = stokes_rays(spec)
    for theta in arr.thetas:
        if abs(phi - theta) <= tol_angle:
            raise RayCollision(
                f"phi={phi} lands on a separating ray boundary; perturb it"
            )
    n = spec.n
    pos = list(range(n + 1))  # pos[original 1-based index] = current position
    seq = []
    for ray, theta in zip(arr.separating, arr.thetas):
        if theta >= phi:
            break
        a, b = ray.pair
        pa, pb = pos[a], pos[b]
        if abs(pa - pb) != 1:
            raise NonGenericRays(
                f"ray {ray.pair} is not adjacent in the current order; "
                "the arrangement is not generic"
            )
        seq.append(min(pa, pb))
        pos[a], pos[b] = pb, pa
    return tuple(seq)

"""Exception types shared across the package."""


class TTStarError(Exception):
    """Base class for all package-specific failures."""


class DegenerateSpectrum(TTStarError):
    """Two eigenvalues coincide."""


class NonGenericRays(TTStarError):
    """Two Stokes rays coincide (pairwise-distinctness fails)."""


class NoAdmissibleDelta(TTStarError):
    """No contour half-angle in (0, pi/2) keeps every jump entry decaying."""


class RayCollision(TTStarError):
    """A rotation angle lands exactly on a separating-ray boundary."""


class NotUnitriangular(TTStarError):
    """Internal consistency failure: a braid move broke unitriangularity."""


class ModulusViolation(TTStarError):
    """A chain parameter has modulus >= 1."""


class InvalidRank(TTStarError):
    """Rank outside the allowed range for the requested Cartan family."""


class ContourViolation(TTStarError):
    """A sample point does not lie on the required contour ray."""


class CertificationMissing(TTStarError):
    """Refusing to discretize jump data whose positivity was refuted."""


class SolveFailure(TTStarError):
    """The collocation system was singular or the iteration diverged."""


class NearContour(TTStarError):
    """Evaluation point too close to the contour for the plain integral."""


class StiffnessFailure(TTStarError):
    """The ODE integrator failed to meet its error control."""


class StructureViolation(TTStarError):
    """A recovered Stokes factor has more than one significant entry."""


class GridTooCoarse(TTStarError):
    """Not enough grid points for the finite-difference stencil."""


class SingularMetric(TTStarError):
    """The metric matrix is not invertible."""

"""Shared fixtures: the equilateral three-point spectrum, the A3 chain
matrix, and a small solved metric curve reused across modules."""

import cmath

import numpy as np
import pytest

from ttstar import exact, solver
from ttstar.geometry import Spectrum

OMEGA = cmath.exp(2j * cmath.pi / 3)


@pytest.fixture(scope="session")
def cube_spec():
    """u = (1, omega, omega^2): admissible, pairwise-distinct rays."""
    return Spectrum((1, OMEGA, OMEGA * OMEGA))


@pytest.fixture(scope="session")
def sa3():
    """Chain Stokes matrix whose symmetrization is the A3 Cartan matrix."""
    return exact.as_matrix([[1, -1, 0], [0, 1, -1], [0, 0, 1]])


@pytest.fixture(scope="session")
def sa2():
    return exact.as_matrix([[1, -1], [0, 1]])


@pytest.fixture(scope="session")
def a3_curve(cube_spec, sa3):
    """Metric curve for the A3 chain on a short log grid."""
    x_grid = np.logspace(np.log10(0.5), np.log10(2.0), 5)
    return solver.metric_curve(cube_spec, sa3, x_grid)

"""Analytic ADE pipeline: Stokes-ray geometry, braid bookkeeping on
unitriangular matrices, Cartan-seed detection, Riemann-Hilbert jump
certification and solving, and isomonodromy verification."""

__version__ = "0.1.0"

"""Numerical laboratory for the two-dimensional Coulomb gas."""

__version__ = "0.1.0"

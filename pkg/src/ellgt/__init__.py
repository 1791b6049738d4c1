"""Elliptic dynamical R-matrices, weight functions, and tensor modules."""

__version__ = "0.1.0"

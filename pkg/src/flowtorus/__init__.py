"""Exact zeta functions, direction hulls and Mahler measures for labeled transition graphs."""

__version__ = "0.1.0"

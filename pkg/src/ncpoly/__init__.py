"""Exact non-commutative Symanzik polynomials of vulcanized Moyal ribbon graphs."""

__version__ = "0.1.0"

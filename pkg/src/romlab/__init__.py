"""Desk-scale laboratory for primes plus lacunary sets of powers of two."""

__version__ = "0.1.0"

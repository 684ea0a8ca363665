"""Discrete Fourier–Bessel analysis on (0, 1)."""

__version__ = "0.1.0"

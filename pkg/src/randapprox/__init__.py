"""Exact and Monte Carlo tools for Diophantine approximation with randomly
selected numerators."""

__version__ = "0.1.0"

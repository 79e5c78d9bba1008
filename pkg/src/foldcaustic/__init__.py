"""Gaussian beam superposition and the exact Airy solution near a fold caustic."""

__version__ = "0.1.0"

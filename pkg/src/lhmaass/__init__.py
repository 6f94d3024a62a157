"""Exact local polynomials of locally harmonic Maass forms, Hecke
polynomials acting on them, and the resulting test for vanishing of twisted
central L-values."""
from ._backend import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]

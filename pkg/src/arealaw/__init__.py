"""Numerical toolkit for area laws, correlation decay and single-shot entropies
on small one-dimensional quantum systems."""
from . import correlations, entropies, merging, mps, qcore, states
from .errors import ArealawError

__version__ = "0.1.0"

__all__ = ["ArealawError", "correlations", "entropies", "merging", "mps", "qcore", "states",
           "__version__"]

"""Unsupervised combinatorial optimization with expectation-form objectives
and incremental greedy derandomization."""
from ._kernels import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]

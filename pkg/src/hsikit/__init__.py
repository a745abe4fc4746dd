"""Computational toolkit for SU(2) extended moduli spaces of surfaces, their
Lagrangian correspondences, and the HSI determination rules."""

from .config import Tolerances, tol, use_tolerances
from .errors import HSIError

__version__ = "0.1.0"

__all__ = ["HSIError", "Tolerances", "tol", "use_tolerances", "__version__"]

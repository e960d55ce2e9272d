"""Finite-scale tools for additive combinatorics: Fourier and Gowers norms,
Freiman maps, sumsets, progressions, quadratic phases and Heisenberg phases."""
from .groups import DenseFn, GroupSpec, PartialMap, Params, indicator

__all__ = ["DenseFn", "GroupSpec", "PartialMap", "Params", "indicator"]

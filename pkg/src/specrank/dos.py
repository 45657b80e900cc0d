"""Sampled spectral density curves."""

from dataclasses import dataclass, field

import numpy as np

from specrank.errors import SpecrankError

__all__ = ["DosCurve"]


@dataclass
class DosCurve:
    """A spectral density sampled on a strictly increasing grid.

    ``grid`` holds abscissae on the original eigenvalue axis and ``density``
    the nonnegative density values; a proper curve integrates to about 1
    over the sampled range. ``meta`` records how the curve was produced
    (method, degree, probe count, damping, window).
    """

    grid: np.ndarray
    density: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.density = np.asarray(self.density, dtype=float)
        if self.grid.shape != self.density.shape or self.grid.ndim != 1:
            raise SpecrankError("grid and density must be 1-D arrays of equal length")
        if self.grid.size < 2:
            raise SpecrankError("a density curve needs at least two samples")
        if not np.all(np.diff(self.grid) > 0):
            raise SpecrankError("grid must be strictly increasing")
        if np.any(self.density < 0):
            raise SpecrankError("density values must be nonnegative")

    def integral(self):
        """Trapezoidal integral over the sampled range."""
        return float(np.trapezoid(self.density, self.grid))

"""Automatic selection of the cutoff between noise and relevant eigenvalues.

All strategies read a density curve (or quadrature weights) and place the
threshold inside the eigenvalue-free region that follows the noise spike
near zero. Curves are normalized to unit maximum and a unit-length axis
before differencing so the fixed slope tolerance is meaningful across
problems of any scale.
"""

from dataclasses import dataclass, field

import numpy as np

from specrank.errors import InvalidConfig, NoGapError

__all__ = [
    "ThresholdResult",
    "select_eps_dos",
    "select_eps_valley_midpoint",
    "select_eps_tau",
    "DEFAULT_TOL",
]

DEFAULT_TOL = -0.01
_VALLEY_FLOOR = 0.01
# Density below this fraction of the peak marks the end of the spectrum.
_MASS_FLOOR = 1e-4
# Fraction of the grid span ignored at each edge: curves are sampled on a
# window widened past the spectral extremes (default widening 1%), and the
# slivers beyond the extremes hold only expansion artifacts and blur tails.
_EDGE_MARGIN = 0.015


@dataclass
class ThresholdResult:
    """Selected cutoff with the evidence used to pick it."""

    eps: float
    method: str  # "deriv" | "valley" | "tau" | "manual"
    diagnostics: dict = field(default_factory=dict)


def _normalized_derivative(curve, stencil=None):
    """Centered finite differences of the max-normalized density on the unit axis.

    The stencil spans a few grid points so that small multiplicative noise
    on the samples does not flip the sign of the slope estimate.
    """
    grid = curve.grid
    density = curve.density
    n = grid.size
    if stencil is None:
        stencil = max(1, n // 80)
    peak = density.max()
    if peak <= 0:
        raise NoGapError("density curve is identically zero")
    ph = density / peak
    tt = (grid - grid[0]) / (grid[-1] - grid[0])
    lo = np.maximum(np.arange(n) - stencil, 0)
    hi = np.minimum(np.arange(n) + stencil, n - 1)
    return (ph[hi] - ph[lo]) / (tt[hi] - tt[lo])


def _scan_range(grid, density):
    """(peak index, last index) of the region a threshold may come from.

    The scan covers the estimated spectral range only: an _EDGE_MARGIN
    band at each end of the grid is dropped (it lies past the widened
    extremes and holds expansion artifacts and blur tails, including the
    flattening of the terminal drop, which is not a gap). Within that
    range, the trailing stretch with density below _MASS_FLOOR of the
    peak carries no spectral mass and is dropped as well.
    """
    margin = _EDGE_MARGIN * (grid[-1] - grid[0])
    inside = np.flatnonzero((grid >= grid[0] + margin) & (grid <= grid[-1] - margin))
    lo, hi = int(inside[0]), int(inside[-1])
    start = lo + int(np.argmax(density[lo : hi + 1]))
    floor = _MASS_FLOOR * density[start]
    end = hi
    while end > start and density[end] <= floor:
        end -= 1
    return start, end


def select_eps_dos(curve, tol=DEFAULT_TOL):
    """First point past the initial drop where the slope recovers above ``tol``.

    Scanning starts at the density peak (the noise spike), waits until the
    normalized slope has fallen below ``tol`` once (the sharp drop), and
    returns the first grid point where it comes back to ``tol`` or above:
    the earliest slow-down of the decrease, which lands in the gap when
    one exists and at the knee otherwise. The scan stops at the last point
    with appreciable mass, so the falloff past the top of the spectrum is
    never mistaken for a gap.
    """
    if curve.grid.size < 16:
        raise InvalidConfig("density curve needs at least 16 grid points")
    if tol >= 0:
        raise InvalidConfig(f"tol must be negative, got {tol}")
    deriv = _normalized_derivative(curve)
    start, end = _scan_range(curve.grid, curve.density)
    diagnostics = {
        "derivative": deriv,
        "grid": curve.grid,
        "density": curve.density,
        "tol": tol,
        "start_index": start,
        "end_index": end,
    }
    dropped = False
    for i in range(start, end + 1):
        if not dropped:
            dropped = deriv[i] < tol
        elif deriv[i] >= tol:
            diagnostics["index"] = i
            return ThresholdResult(float(curve.grid[i]), "deriv", diagnostics)
    raise NoGapError(
        "no detectable gap: the density slope never "
        + ("recovered above" if dropped else "fell below")
        + f" tol={tol}",
        diagnostics=diagnostics,
    )


def _below_floor_runs(density, start, floor, end):
    """Maximal runs of indices in (start, end] with density <= floor.

    A run reaching ``end`` has no mass after it: that is the tail of the
    spectrum, not a valley between clusters, so it is dropped.
    """
    mask = density <= floor
    runs = []
    i = start + 1
    while i <= end:
        if mask[i]:
            j = i
            while j + 1 <= end and mask[j + 1]:
                j += 1
            runs.append((i, j))
            i = j + 1
        else:
            i += 1
    return [(a, b) for (a, b) in runs if b < end]


def select_eps_valley_midpoint(curve, tol=DEFAULT_TOL):
    """Midpoint of the first near-zero valley after the noise spike.

    A valley is a maximal run of grid points whose density stays below 1%
    of the curve maximum, located after the peak and followed by further
    mass. Falls back to the derivative rule when no such run exists.
    """
    if curve.grid.size < 16:
        raise InvalidConfig("density curve needs at least 16 grid points")
    peak_index, end = _scan_range(curve.grid, curve.density)
    floor = _VALLEY_FLOOR * curve.density[peak_index]
    runs = _below_floor_runs(curve.density, peak_index, floor, end)
    if not runs:
        return select_eps_dos(curve, tol=tol)
    i0, i1 = runs[0]
    eps = 0.5 * (curve.grid[i0] + curve.grid[i1])
    diagnostics = {
        "valley": (int(i0), int(i1)),
        "floor": floor,
        "grid": curve.grid,
        "density": curve.density,
        "index": int((i0 + i1) // 2),
    }
    return ThresholdResult(float(eps), "valley", diagnostics)


def select_eps_tau(data):
    """Threshold from the quadrature weights of each Lanczos run.

    Per probe: the weights drop away from the noise spike, so the first
    node where consecutive weights stop decreasing marks the far side of
    the gap. Probes whose first difference is not negative abstain; the
    probe thresholds are aggregated by their median.
    """
    votes = []
    abstained = 0
    for spectrum in data.per_probe:
        w = spectrum.weights
        if w.size < 2:
            abstained += 1
            continue
        diffs = np.diff(w)
        if diffs[0] >= 0:
            abstained += 1
            continue
        hits = np.flatnonzero(diffs >= 0)
        if hits.size == 0:
            abstained += 1
            continue
        votes.append(float(spectrum.nodes[hits[0]]))
    diagnostics = {"votes": votes, "abstained": abstained}
    if not votes:
        raise NoGapError(
            "no detectable gap: every probe's weight sequence kept decreasing",
            diagnostics=diagnostics,
        )
    return ThresholdResult(float(np.median(votes)), "tau", diagnostics)

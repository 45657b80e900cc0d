"""Lanczos-quadrature density, cumulative density, counts, and rank.

Each probe yields a small Gauss quadrature rule for the operator's
spectral measure; scaled by the dimension, the weights falling inside an
interval count its eigenvalues. The rank uses the complement form (one
minus the weight at or below the cutoff) because extreme eigenvalues are
the ones a short Lanczos run resolves best.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from specrank import threshold as _threshold
from specrank.dos import DosCurve
from specrank.errors import InvalidConfig, InvalidInterval
from specrank.lanczos import RitzSpectrum, lanczos, tridiag_eigen
from specrank.probe import ProbeConfig, SampleSeries, generate_probes, map_over_probes
from specrank.results import RankEstimate
from specrank.threshold import ThresholdResult

__all__ = [
    "RitzData",
    "CdosCurve",
    "collect_ritz",
    "count_eigs_lanczos",
    "rank_lanczos",
    "cdos",
    "evaluate_dos_lanczos",
    "estimate_rank_lanczos",
]


@dataclass
class RitzData:
    """One quadrature rule per probe, all from the same number of steps."""

    per_probe: list[RitzSpectrum]
    n: int
    steps: int
    meta: dict = field(default_factory=dict)

    @property
    def num_probes(self):
        return len(self.per_probe)

    def node_range(self):
        all_nodes = np.concatenate([s.nodes for s in self.per_probe])
        return float(all_nodes.min()), float(all_nodes.max())


@dataclass
class CdosCurve:
    """Cumulative spectral density as per-probe and aggregated step functions."""

    per_probe: list[tuple[np.ndarray, np.ndarray]]
    nodes: np.ndarray
    cumulative: np.ndarray


def collect_ritz(op, steps, probes, reorth=None, threads=1):
    """Quadrature rules (nodes and weights) for every probe vector.

    Runs that break down early keep the nodes they found; their weights
    already sum to one on the invariant subspace, and the truncation is
    flagged in ``meta``.
    """
    if not probes:
        raise InvalidConfig("at least one probe vector is required")

    def one(l):
        tri = lanczos(op, probes[l], steps, reorth=reorth)
        spectrum = tridiag_eigen(tri)
        total = spectrum.weights.sum()
        if abs(total - 1.0) > 1e-14:
            spectrum = RitzSpectrum(spectrum.nodes, spectrum.weights / total, meta=spectrum.meta)
        return spectrum

    rules = map_over_probes(one, len(probes), threads)
    truncated = sum(1 for r in rules if r.meta.get("breakdown"))
    return RitzData(per_probe=rules, n=op.n, steps=steps, meta={"truncated": truncated})


def count_eigs_lanczos(data, a, b):
    """Per-probe eigenvalue count over the half-open interval (a, b].

    Half-open so adjacent intervals partition the axis without counting a
    node twice.
    """
    if not b > a:
        raise InvalidInterval(f"need a < b, got a={a}, b={b}")
    estimates = [
        data.n * s.weights[(s.nodes > a) & (s.nodes <= b)].sum() for s in data.per_probe
    ]
    return SampleSeries(np.asarray(estimates))


def _per_probe_rank(data, eps):
    # Prefix-sum form, shared with cdos() so the two rank readings agree bitwise.
    out = np.empty(data.num_probes)
    for i, s in enumerate(data.per_probe):
        last = np.searchsorted(s.nodes, eps, side="right") - 1
        rho_sq = np.cumsum(s.weights)[last] if last >= 0 else 0.0
        out[i] = data.n * (1.0 - rho_sq)
    return out


def rank_lanczos(data, eps):
    """Rank estimate at cutoff ``eps`` via the complement of the low weight.

    Per probe: n times (1 - sum of weights at nodes <= eps).
    """
    series = SampleSeries(_per_probe_rank(data, eps))
    lo, hi = data.node_range()
    return RankEstimate(
        series=series,
        eps=float(eps),
        method="lanczos",
        window=(lo, hi),
        threshold=ThresholdResult(float(eps), "manual"),
        steps=data.steps,
        num_probes=data.num_probes,
    )


def cdos(data, eps):
    """Cumulative density curve plus the rank read off it.

    The cumulative weight at the largest node not exceeding ``eps`` equals
    the weight sum used by ``rank_lanczos``, so the two rank estimates are
    identical by construction.
    """
    per_probe = []
    for s in data.per_probe:
        per_probe.append((s.nodes.copy(), np.cumsum(s.weights)))
    estimates = _per_probe_rank(data, eps)

    merged = np.unique(np.concatenate([nodes for nodes, _ in per_probe]))
    aggregate = np.zeros(merged.size)
    for nodes, cumulative in per_probe:
        idx = np.searchsorted(nodes, merged, side="right") - 1
        aggregate += np.where(idx >= 0, cumulative[np.maximum(idx, 0)], 0.0)
    aggregate /= data.num_probes

    curve = CdosCurve(per_probe=per_probe, nodes=merged, cumulative=aggregate)
    series = SampleSeries(np.asarray(estimates))
    lo, hi = data.node_range()
    estimate = RankEstimate(
        series=series,
        eps=float(eps),
        method="lanczos-cdos",
        window=(lo, hi),
        threshold=ThresholdResult(float(eps), "manual"),
        steps=data.steps,
        num_probes=data.num_probes,
    )
    return curve, estimate


def evaluate_dos_lanczos(data, grid_points=400, blur=None):
    """Density curve from the quadrature rules, with Gaussian regularization.

    Each point mass becomes a Gaussian of standard deviation ``blur``
    (default: spectral width over twice the step count). The grid extends
    four blur widths past the extreme nodes so the curve integrates to one.
    """
    if grid_points < 16:
        raise InvalidConfig(f"grid_points must be >= 16, got {grid_points}")
    lo, hi = data.node_range()
    if blur is None:
        width = hi - lo
        blur = (width if width > 0 else max(abs(hi), 1.0)) / (2.0 * data.steps)
    if blur <= 0:
        raise InvalidConfig(f"blur must be positive, got {blur}")
    grid = np.linspace(lo - 4.0 * blur, hi + 4.0 * blur, grid_points)
    density = np.zeros(grid_points)
    for s in data.per_probe:
        z = (grid[:, None] - s.nodes[None, :]) / blur
        density += (s.weights[None, :] * np.exp(-0.5 * z * z)).sum(axis=1)
    density /= data.num_probes * blur * np.sqrt(2.0 * np.pi)
    meta = {
        "method": "lanczos",
        "degree": data.steps,
        "num_probes": data.num_probes,
        "blur": float(blur),
        "window": (lo, hi),
    }
    return DosCurve(grid=grid, density=density, meta=meta)


def estimate_rank_lanczos(
    op,
    steps=50,
    config=None,
    eps=None,
    strategy="valley",
    tol=_threshold.DEFAULT_TOL,
    grid_points=400,
    blur=None,
    threads=1,
):
    """Full Lanczos rank estimation pipeline for a symmetric PSD operator.

    Collects per-probe quadrature rules, selects the cutoff from the
    regularized density (or from the weight differences with
    ``strategy="tau"``), and evaluates the complement-form rank.
    """
    config = config or ProbeConfig()
    timings = {}

    start = time.perf_counter()
    probes = generate_probes(op.n, config)
    data = collect_ritz(op, steps, probes, threads=threads)
    timings["lanczos"] = time.perf_counter() - start

    start = time.perf_counter()
    curve = evaluate_dos_lanczos(data, grid_points=grid_points, blur=blur)
    if eps is not None:
        chosen = ThresholdResult(float(eps), "manual")
    elif strategy == "tau":
        chosen = _threshold.select_eps_tau(data)
    elif strategy == "valley":
        chosen = _threshold.select_eps_valley_midpoint(curve, tol=tol)
    elif strategy == "deriv":
        chosen = _threshold.select_eps_dos(curve, tol=tol)
    else:
        raise InvalidConfig(f"unknown threshold strategy {strategy!r}")
    timings["threshold"] = time.perf_counter() - start

    start = time.perf_counter()
    series = SampleSeries(_per_probe_rank(data, chosen.eps))
    timings["count"] = time.perf_counter() - start
    timings["total"] = sum(timings.values())

    lo, hi = data.node_range()
    return RankEstimate(
        series=series,
        eps=chosen.eps,
        method="lanczos",
        window=(lo, hi),
        threshold=chosen,
        dos=curve,
        steps=steps,
        num_probes=config.num_probes,
        damping=None,
        timings=timings,
        meta={"truncated": data.meta.get("truncated", 0)},
    )

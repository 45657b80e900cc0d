"""Chebyshev kernel polynomial estimator: moments, damping, density, counts.

The operator is mapped onto [-1, 1], the three-term recurrence produces
probe-wise Chebyshev traces, and everything else (density curve, interval
eigenvalue counts, the rank) is a weighted sum of those traces. Interval
counts reuse the stored probe table, so they cost no extra matvecs.
"""

import enum
import time
from collections import namedtuple
from dataclasses import dataclass

import numpy as np

from specrank import kernels
from specrank import threshold as _threshold
from specrank.dos import DosCurve
from specrank.errors import InvalidConfig, InvalidInterval, InvalidWindow, MomentBlowupError
from specrank.lanczos import spectrum_bounds
from specrank.linops import ShiftedScaled, SparseSymmetric, shift_scale
from specrank.probe import ProbeConfig, SampleSeries, generate_probes, map_over_probes
from specrank.results import RankEstimate
from specrank.threshold import ThresholdResult

__all__ = [
    "DampingKind",
    "Window",
    "ChebyshevMoments",
    "chebyshev_moments",
    "exact_moments",
    "damping_factors",
    "evaluate_dos",
    "step_coeffs",
    "count_eigs_kpm",
    "rank_kpm",
]

_BLOWUP_LIMIT = 1e6

Window = namedtuple("Window", ["lo", "hi", "center", "halfwidth"])


def make_window(lo, hi):
    if not hi > lo:
        raise InvalidWindow(f"invalid spectral window: [{lo}, {hi}]")
    return Window(float(lo), float(hi), 0.5 * (hi + lo), 0.5 * (hi - lo))


class DampingKind(enum.Enum):
    """Gibbs-suppression multipliers applied to a truncated expansion."""

    NONE = "none"
    JACKSON = "jackson"
    LANCZOS_SIGMA = "sigma"


@dataclass
class ChebyshevMoments:
    """Undamped expansion coefficients of the weighted density.

    ``probe_table`` keeps the per-probe Chebyshev traces (degree+1 rows,
    one column per probe) so interval counts can be formed later without
    touching the operator again; it is None for exact-trace moments.
    """

    moments: np.ndarray
    degree: int
    window: Window
    probe_table: np.ndarray | None = None

    @property
    def num_probes(self):
        return None if self.probe_table is None else self.probe_table.shape[1]


def _probe_column_generic(opB, degree, v):
    """Recurrence column y[k] = v . T_k(B) v via operator applies."""
    y = np.empty(degree + 1)
    w0 = v
    y[0] = v @ v
    w1 = opB.apply(v)
    if degree >= 1:
        y[1] = v @ w1
    for k in range(2, degree + 1):
        w0, w1 = w1, 2.0 * opB.apply(w1) - w0
        y[k] = v @ w1
    return y


def _probe_column(opB, degree, v):
    inner = opB
    center, halfwidth = 0.0, 1.0
    if isinstance(inner, ShiftedScaled):
        center, halfwidth = inner.center, inner.halfwidth
        inner = inner.inner
    if isinstance(inner, SparseSymmetric):
        return kernels.cheb_probe_table(
            inner.indptr, inner.indices, inner.data, center, halfwidth, v, degree
        )
    return _probe_column_generic(opB, degree, v)


def _window_of(opB):
    if isinstance(opB, ShiftedScaled):
        lo = opB.center - opB.halfwidth
        hi = opB.center + opB.halfwidth
        return Window(lo, hi, opB.center, opB.halfwidth)
    return Window(-1.0, 1.0, 0.0, 1.0)


def chebyshev_moments(opB, degree, probes, threads=1, keep_table=True):
    """Stochastic Chebyshev moments of an operator already mapped into [-1, 1].

    Each probe runs the three-term recurrence (exactly ``degree`` matvecs)
    and records its trace column; the moments average those columns. A
    diverging recurrence means the spectrum escaped [-1, 1] and raises
    MomentBlowupError.
    """
    if degree < 1:
        raise InvalidConfig(f"degree must be >= 1, got {degree}")
    if not probes:
        raise InvalidConfig("at least one probe vector is required")
    columns = map_over_probes(lambda l: _probe_column(opB, degree, probes[l]), len(probes), threads)
    table = np.column_stack(columns)
    worst = np.abs(table, where=np.isfinite(table), out=np.zeros_like(table)).max()
    if not np.isfinite(table).all() or worst > _BLOWUP_LIMIT:
        raise MomentBlowupError(
            "Chebyshev recurrence diverged; increase the safety margin of the spectral window"
        )
    moments = table.mean(axis=1) / np.pi
    moments[1:] *= 2.0
    return ChebyshevMoments(
        moments=moments,
        degree=degree,
        window=_window_of(opB),
        probe_table=table if keep_table else None,
    )


def exact_moments(eigenvalues, degree, window):
    """Moments from a known spectrum instead of the trace estimator.

    Useful for reference density plots and for isolating the estimator's
    stochastic error in tests.
    """
    eigenvalues = np.asarray(eigenvalues, dtype=float)
    win = window if isinstance(window, Window) else make_window(*window)
    mapped = (eigenvalues - win.center) / win.halfwidth
    if np.any(np.abs(mapped) > 1.0 + 1e-12):
        raise InvalidWindow("eigenvalues fall outside the window")
    mapped = np.clip(mapped, -1.0, 1.0)
    angles = np.arccos(mapped)
    k = np.arange(degree + 1)
    moments = np.cos(np.outer(k, angles)).sum(axis=1) / (eigenvalues.size * np.pi)
    moments[1:] *= 2.0
    return ChebyshevMoments(moments=moments, degree=degree, window=win, probe_table=None)


def damping_factors(kind, degree):
    """Damping multipliers g_0..g_degree for the given kind."""
    k = np.arange(degree + 1)
    if kind is DampingKind.NONE or kind is None:
        return np.ones(degree + 1)
    if kind is DampingKind.JACKSON:
        angle = np.pi / (degree + 2)
        return np.sin((k + 1) * angle) / ((degree + 2) * np.sin(angle)) + (
            1.0 - (k + 1) / (degree + 2)
        ) * np.cos(k * angle)
    if kind is DampingKind.LANCZOS_SIGMA:
        angle = np.pi / (degree + 1)
        factors = np.ones(degree + 1)
        factors[1:] = np.sin(k[1:] * angle) / (k[1:] * angle)
        return factors
    raise InvalidConfig(f"unknown damping kind {kind!r}")


def evaluate_dos(mom, damping=DampingKind.JACKSON, grid_points=400):
    """Density curve on the eigenvalue axis from Chebyshev moments.

    Evaluates the damped expansion on interior Chebyshev abscissae (which
    avoid the endpoint singularity of the weight exactly), maps them back
    to the eigenvalue axis, rescales so the curve integrates to one there,
    and clamps negative expansion artifacts to zero.
    """
    if grid_points < 16:
        raise InvalidConfig(f"grid_points must be >= 16, got {grid_points}")
    angles = np.pi * (np.arange(grid_points) + 0.5) / grid_points
    t = np.cos(angles)[::-1]
    factors = damping_factors(damping, mom.degree) * mom.moments
    # T_k(cos angle) = cos(k * angle); one outer product evaluates the grid.
    values = np.cos(np.outer(np.arccos(t), np.arange(mom.degree + 1))) @ factors
    values /= np.sqrt(1.0 - t**2)
    win = mom.window
    density = np.maximum(values / win.halfwidth, 0.0)
    grid = win.center + win.halfwidth * t
    meta = {
        "method": "kpm",
        "degree": mom.degree,
        "num_probes": mom.num_probes,
        "damping": (damping or DampingKind.NONE).value,
        "window": (win.lo, win.hi),
    }
    return DosCurve(grid=grid, density=density, meta=meta)


def _sin_terms(x, k):
    """sin(k * arccos(x)) with exact zeros at the interval endpoints."""
    if x <= -1.0 or x >= 1.0:
        return np.zeros(k.size), (np.pi if x <= -1.0 else 0.0)
    angle = np.arccos(x)
    return np.sin(k * angle), angle


def step_coeffs(a, b, degree):
    """Chebyshev coefficients of the indicator of [a, b] within [-1, 1].

    These are exactly the weights that turn the probe traces into an
    eigenvalue count over the interval.
    """
    if not -1.0 <= a < b <= 1.0:
        raise InvalidInterval(f"need -1 <= a < b <= 1, got a={a}, b={b}")
    k = np.arange(1, degree + 1)
    sin_a, angle_a = _sin_terms(a, k)
    sin_b, angle_b = _sin_terms(b, k)
    coeffs = np.empty(degree + 1)
    coeffs[0] = (angle_a - angle_b) / np.pi
    coeffs[1:] = (2.0 / np.pi) * (sin_a - sin_b) / k
    return coeffs


def count_eigs_kpm(mom, a, b, damping=DampingKind.JACKSON):
    """Per-probe eigenvalue count over [a, b] from the stored probe table.

    The interval is mapped into [-1, 1] and clipped to the window; an
    interval that misses the window entirely counts zero. No operator
    applies happen here.
    """
    if mom.probe_table is None:
        raise InvalidConfig("moments were built without a probe table; counts unavailable")
    if not b > a:
        raise InvalidInterval(f"need a < b, got a={a}, b={b}")
    win = mom.window
    a_hat = (a - win.center) / win.halfwidth
    b_hat = (b - win.center) / win.halfwidth
    a_hat, b_hat = max(a_hat, -1.0), min(b_hat, 1.0)
    n = mom.probe_table.shape  # (degree+1, num_probes)
    if a_hat >= b_hat:
        return SampleSeries(np.zeros(n[1]))
    coeffs = step_coeffs(a_hat, b_hat, mom.degree) * damping_factors(damping, mom.degree)
    return SampleSeries(mom.probe_table.T @ coeffs)


def _auto_threshold(curve, strategy, tol):
    if strategy == "valley":
        return _threshold.select_eps_valley_midpoint(curve, tol=tol)
    if strategy == "deriv":
        return _threshold.select_eps_dos(curve, tol=tol)
    raise InvalidConfig(f"unknown threshold strategy {strategy!r} for a density curve")


def rank_kpm(
    op,
    degree=50,
    config=None,
    damping=DampingKind.JACKSON,
    eps=None,
    strategy="valley",
    tol=_threshold.DEFAULT_TOL,
    grid_points=400,
    window=None,
    threads=1,
    bounds_steps=30,
    safety=0.01,
):
    """Full KPM rank estimation pipeline for a symmetric PSD operator.

    Estimates the spectral window, maps the operator, forms stochastic
    moments, evaluates the density, selects the cutoff (unless ``eps`` is
    supplied), and counts eigenvalues above it. The per-probe count is
    scaled by the dimension, so the mean over probes is the rank estimate.
    """
    config = config or ProbeConfig()
    timings = {}

    start = time.perf_counter()
    if window is None:
        lo, hi = spectrum_bounds(op, bounds_steps, safety, assume_psd=True, seed=config.seed)
    else:
        lo, hi = window
    win = make_window(lo, hi)
    timings["bounds"] = time.perf_counter() - start

    start = time.perf_counter()
    opB = shift_scale(op, win.lo, win.hi)
    probes = generate_probes(op.n, config)
    mom = chebyshev_moments(opB, degree, probes, threads=threads)
    timings["moments"] = time.perf_counter() - start

    start = time.perf_counter()
    curve = evaluate_dos(mom, damping=damping, grid_points=grid_points)
    if eps is None:
        chosen = _auto_threshold(curve, strategy, tol)
    else:
        chosen = ThresholdResult(float(eps), "manual")
    timings["threshold"] = time.perf_counter() - start

    start = time.perf_counter()
    if chosen.eps >= win.hi:
        series = SampleSeries(np.zeros(config.num_probes))
    else:
        series = count_eigs_kpm(mom, chosen.eps, win.hi, damping=damping)
        series = SampleSeries(op.n * series.per_probe)
    timings["count"] = time.perf_counter() - start
    timings["total"] = sum(timings.values())

    return RankEstimate(
        series=series,
        eps=chosen.eps,
        method="kpm",
        window=(win.lo, win.hi),
        threshold=chosen,
        dos=curve,
        steps=degree,
        num_probes=config.num_probes,
        damping=(damping or DampingKind.NONE).value,
        timings=timings,
    )

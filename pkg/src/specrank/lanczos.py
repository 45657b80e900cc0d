"""Lanczos tridiagonalization, spectrum bounds, and the tridiagonal eigensolver.

The eigensolver runs implicit-shift QL sweeps directly on the tridiagonal
form while accumulating only the first row of the eigenvector matrix; the
squared entries of that row are exactly the Gauss quadrature weights of
the measure carried by the starting vector.
"""

from dataclasses import dataclass, field

import numpy as np

from specrank import probe as _probe
from specrank.errors import ConvergenceError, InvalidConfig, KrylovError, SpecrankError
from specrank.linops import gershgorin_range

__all__ = [
    "TridiagonalMatrix",
    "RitzSpectrum",
    "lanczos",
    "spectrum_bounds",
    "tridiag_eigen",
]

_BREAKDOWN_RTOL = 1e-12
_REORTH_DEFAULT_LIMIT = 200


@dataclass
class TridiagonalMatrix:
    """Symmetric tridiagonal matrix from a Lanczos run.

    ``diag`` has the m diagonal entries and ``offdiag`` the m-1 couplings,
    stored nonnegative by the sign convention of the recurrence. ``breakdown``
    marks runs truncated early because an off-diagonal underflowed; the
    truncated matrix still represents an exact invariant subspace.
    """

    diag: np.ndarray
    offdiag: np.ndarray
    breakdown: bool = False
    basis: np.ndarray | None = None

    def __post_init__(self):
        self.diag = np.asarray(self.diag, dtype=float)
        self.offdiag = np.asarray(self.offdiag, dtype=float)
        if self.diag.size == 0 or self.offdiag.size != self.diag.size - 1:
            raise SpecrankError("offdiag must have exactly one entry less than diag")
        if np.any(self.offdiag < 0):
            raise SpecrankError("offdiag entries must be nonnegative")

    @property
    def steps(self):
        return self.diag.size

    def to_dense(self):
        t = np.diag(self.diag)
        if self.offdiag.size:
            t += np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)
        return t


@dataclass
class RitzSpectrum:
    """Gauss quadrature rule of one Lanczos run: ascending nodes and weights.

    ``nodes`` are the Ritz values and ``weights`` the squared first
    components of the tridiagonal eigenvectors; the weights sum to 1.
    """

    nodes: np.ndarray
    weights: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.nodes = np.asarray(self.nodes, dtype=float)
        self.weights = np.asarray(self.weights, dtype=float)
        if self.nodes.shape != self.weights.shape:
            raise SpecrankError("nodes and weights must have equal length")
        if np.any(np.diff(self.nodes) < 0):
            raise SpecrankError("nodes must be ascending")
        if np.any(self.weights < 0):
            raise SpecrankError("weights must be nonnegative")
        if abs(self.weights.sum() - 1.0) > 1e-10:
            raise SpecrankError(f"weights must sum to 1, got {self.weights.sum()!r}")


def lanczos(op, v1, m, reorth=None, keep_basis=False):
    """Run ``m`` Lanczos steps of ``op`` from the unit vector ``v1``.

    Full reorthogonalization is on by default for m <= 200, where its cost
    is negligible next to the matvecs and it protects the quadrature
    weights from loss of orthogonality. If an off-diagonal underflows
    below 1e-12 times the running scale of the matrix, the run stops and
    the truncated matrix is returned with ``breakdown`` set.
    """
    n = op.n
    if m < 1:
        raise InvalidConfig(f"Lanczos needs at least one step, got m={m}")
    if m > n:
        raise KrylovError(f"Krylov dimension m={m} cannot exceed operator dimension n={n}")
    if reorth is None:
        reorth = m <= _REORTH_DEFAULT_LIMIT

    v1 = np.asarray(v1, dtype=float)
    norm = np.linalg.norm(v1)
    if norm == 0:
        raise InvalidConfig("starting vector must be nonzero")
    basis = np.empty((m, n))
    basis[0] = v1 / norm
    diag = np.empty(m)
    offdiag = np.empty(max(m - 1, 0))
    scale = 0.0
    breakdown = False
    steps = m

    for j in range(m):
        w = op.apply(basis[j])
        a = basis[j] @ w
        diag[j] = a
        scale = max(scale, abs(a))
        w -= a * basis[j]
        if j > 0:
            w -= offdiag[j - 1] * basis[j - 1]
        if reorth:
            w -= basis[: j + 1].T @ (basis[: j + 1] @ w)
        if j == m - 1:
            break
        b = np.linalg.norm(w)
        if b <= _BREAKDOWN_RTOL * max(scale, 1e-300):
            breakdown = True
            steps = j + 1
            break
        offdiag[j] = b
        scale = max(scale, b)
        basis[j + 1] = w / b

    result = TridiagonalMatrix(
        diag[:steps].copy(),
        offdiag[: max(steps - 1, 0)].copy(),
        breakdown=breakdown,
        basis=basis[:steps].copy() if keep_basis else None,
    )
    return result


def spectrum_bounds(op, m_bounds=30, safety=0.01, assume_psd=False, seed=0):
    """Estimated spectral interval from a short Lanczos run.

    The extreme Ritz values are widened by ``safety`` times the observed
    spectral width on each side (Ritz values underestimate the extremes).
    With ``assume_psd`` the lower bound is clamped into [-widening, 0]:
    never above zero, because unseen eigenvalues can hide near it, and
    never more than the widening below, because a PSD spectrum does not
    extend past zero. On breakdown before two steps, dense, sparse and
    diagonal variants fall back to Gershgorin bounds.
    """
    if m_bounds < 2:
        raise InvalidConfig(f"m_bounds must be >= 2, got {m_bounds}")
    if safety < 0:
        raise InvalidConfig(f"safety must be nonnegative, got {safety}")

    v1 = _probe.probe_vector(op.n, _probe.ProbeConfig(num_probes=1, seed=seed), _probe.AUX_STREAM)
    tri = lanczos(op, v1, min(m_bounds, op.n))
    if tri.steps < 2:
        grange = gershgorin_range(op)
        if grange is None:
            raise KrylovError(
                "Lanczos broke down before two steps and the operator has no "
                "cheap entrywise bounds; supply the window explicitly"
            )
        lo, hi = grange
    else:
        ritz = tridiag_eigen(tri)
        lo, hi = float(ritz.nodes[0]), float(ritz.nodes[-1])

    width = hi - lo
    widening = safety * (width if width > 0 else max(abs(hi), abs(lo), 1.0))
    lo -= widening
    hi += widening
    if assume_psd:
        lo = min(0.0, max(lo, -widening))
    return lo, hi


def tridiag_eigen(tri, sweep_budget=30):
    """Full eigendecomposition of a symmetric tridiagonal matrix.

    Implicit-shift QL iterations with Wilkinson shifts; only the first row
    of the accumulated rotation product is carried, and its squares are
    returned as the quadrature weights. Raises ConvergenceError if any
    eigenvalue needs more than ``sweep_budget`` sweeps (the default budget
    caps total rotations at roughly 30 m).
    """
    d = tri.diag.copy()
    m = d.size
    e = np.zeros(m)
    if m > 1:
        e[: m - 1] = tri.offdiag
    z = np.zeros(m)
    z[0] = 1.0
    eps = np.finfo(float).eps

    for l in range(m):
        iterations = 0
        while True:
            split = l
            while split < m - 1:
                scale = abs(d[split]) + abs(d[split + 1])
                if abs(e[split]) <= eps * scale:
                    break
                split += 1
            if split == l:
                break
            iterations += 1
            if iterations > sweep_budget:
                raise ConvergenceError(
                    f"tridiagonal eigensolver exceeded {sweep_budget} sweeps at index {l}"
                )
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = np.hypot(g, 1.0)
            g = d[split] - d[l] + e[l] / (g + (r if g >= 0 else -r))
            s = c = 1.0
            p = 0.0
            underflow = False
            for i in range(split - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = np.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[split] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                f = z[i + 1]
                z[i + 1] = s * z[i] + c * f
                z[i] = c * z[i] - s * f
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[split] = 0.0

    order = np.argsort(d, kind="stable")
    weights = z[order] ** 2
    total = weights.sum()
    if abs(total - 1.0) > 1e-10:
        raise ConvergenceError(f"first-row weights lost normalization: sum={total!r}")
    return RitzSpectrum(d[order], weights / total, meta={"breakdown": tri.breakdown})

"""Dense eigensolver oracle: exact ground truth at desk scale.

Backed by LAPACK's symmetric eigensolver (Householder reduction plus
implicit-shift iterations on the tridiagonal form). The optional
verification mode spot-checks residuals with inverse iteration.
"""

from dataclasses import dataclass

import numpy as np

from specrank.dos import DosCurve
from specrank.errors import InvalidConfig, InvalidInterval, OracleCapError, OracleVerificationError
from specrank.linops import LinearOperator

__all__ = ["ExactSpectrum", "dense_eigs", "exact_count", "exact_dos", "DEFAULT_CAP"]

DEFAULT_CAP = 4096


@dataclass
class ExactSpectrum:
    """All eigenvalues of a symmetric matrix, ascending."""

    eigenvalues: np.ndarray

    def __post_init__(self):
        self.eigenvalues = np.asarray(self.eigenvalues, dtype=float)

    @property
    def n(self):
        return self.eigenvalues.size


def _verify_residuals(matrix, eigenvalues, samples=5, rtol=1e-8):
    scale = max(abs(eigenvalues[0]), abs(eigenvalues[-1]), 1e-300)
    n = eigenvalues.size
    picks = np.unique(np.linspace(0, n - 1, min(samples, n)).astype(int))
    rng = np.random.Generator(np.random.Philox(key=[0, 0]))
    eye = np.eye(n)
    for idx in picks:
        lam = eigenvalues[idx]
        # Inverse iteration with a slightly detuned shift; two passes suffice.
        shifted = matrix - (lam + 1e-8 * scale) * eye
        x = rng.standard_normal(n)
        for _ in range(2):
            try:
                x = np.linalg.solve(shifted, x)
            except np.linalg.LinAlgError:
                x = rng.standard_normal(n)
                continue
            x /= np.linalg.norm(x)
        residual = np.linalg.norm(matrix @ x - lam * x)
        if residual > rtol * scale:
            raise OracleVerificationError(
                f"residual {residual:.3e} exceeds {rtol:.0e} * |A| for eigenvalue {lam!r}"
            )


def dense_eigs(a, cap=DEFAULT_CAP, verify=False):
    """All eigenvalues of a dense symmetric matrix or densifiable operator.

    Refuses inputs above ``cap`` (the estimators are the tool for those).
    """
    if isinstance(a, LinearOperator):
        if a.n > cap:
            raise OracleCapError(
                f"n={a.n} exceeds the oracle cap {cap}; use the KPM or Lanczos estimators"
            )
        a = a.to_dense()
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidConfig(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] > cap:
        raise OracleCapError(
            f"n={a.shape[0]} exceeds the oracle cap {cap}; use the KPM or Lanczos estimators"
        )
    eigenvalues = np.linalg.eigvalsh(a)
    if verify:
        _verify_residuals(a, eigenvalues)
    return ExactSpectrum(eigenvalues)


def exact_count(spectrum, a, b):
    """Number of eigenvalues in the half-open interval (a, b]."""
    if not b > a:
        raise InvalidInterval(f"need a < b, got a={a}, b={b}")
    ev = spectrum.eigenvalues
    return int(np.searchsorted(ev, b, side="right") - np.searchsorted(ev, a, side="right"))


def exact_dos(spectrum, grid_points=400, blur=None):
    """Gaussian-blurred rendering of the exact eigenvalue comb."""
    ev = spectrum.eigenvalues
    lo, hi = float(ev.min()), float(ev.max())
    if blur is None:
        width = hi - lo
        blur = (width if width > 0 else max(abs(hi), 1.0)) / 100.0
    if blur <= 0:
        raise InvalidConfig(f"blur must be positive, got {blur}")
    grid = np.linspace(lo - 4.0 * blur, hi + 4.0 * blur, grid_points)
    z = (grid[:, None] - ev[None, :]) / blur
    density = np.exp(-0.5 * z * z).sum(axis=1) / (ev.size * blur * np.sqrt(2.0 * np.pi))
    meta = {"method": "exact", "blur": float(blur), "window": (lo, hi)}
    return DosCurve(grid=grid, density=density, meta=meta)

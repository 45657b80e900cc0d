"""Symmetric linear operators accessed only through matrix-vector products.

Every estimator in the package touches its input exclusively via
``op.apply(v)``, so anything that can multiply a vector qualifies: dense
arrays, CSR sparse matrices, diagonals, implicit Gram products of a
rectangular factor, and the affine shift-scale wrapper that maps a
spectrum into [-1, 1]. Operators are immutable after construction and can
be shared freely across concurrent probe evaluations.
"""

import numpy as np

from specrank import kernels
from specrank.errors import DimensionMismatch, InvalidWindow, SpecrankError

__all__ = [
    "LinearOperator",
    "DenseSymmetric",
    "SparseSymmetric",
    "Diagonal",
    "Gram",
    "ShiftedScaled",
    "shift_scale",
    "gershgorin_range",
]


class LinearOperator:
    """Base class: a square symmetric operator of dimension ``n``."""

    n: int

    def apply(self, v):
        """Return A @ v, validating the input length."""
        v = np.asarray(v, dtype=float)
        if v.shape != (self.n,):
            raise DimensionMismatch(self.n, v.shape[0] if v.ndim == 1 else v.shape)
        return self._matvec(v)

    def _matvec(self, v):
        raise NotImplementedError

    def to_dense(self):
        """Materialize the full matrix. Intended for desk-scale diagnostics."""
        raise NotImplementedError(f"{type(self).__name__} cannot be densified")


class DenseSymmetric(LinearOperator):
    """Operator backed by an explicit symmetric n x n array."""

    def __init__(self, matrix):
        matrix = np.asarray(matrix, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise SpecrankError(f"expected a square matrix, got shape {matrix.shape}")
        self.matrix = matrix
        self.n = matrix.shape[0]

    def _matvec(self, v):
        return self.matrix @ v

    def to_dense(self):
        return self.matrix.copy()


class Diagonal(LinearOperator):
    """Operator with the given diagonal and zeros elsewhere."""

    def __init__(self, values):
        self.values = np.asarray(values, dtype=float)
        if self.values.ndim != 1 or self.values.size == 0:
            raise SpecrankError("diagonal must be a nonempty 1-D sequence")
        self.n = self.values.size

    def _matvec(self, v):
        return self.values * v

    def to_dense(self):
        return np.diag(self.values)


def _coalesce_triplets(n_rows, n_cols, rows, cols, values):
    """Sort triplets row-major, sum duplicates, and return CSR arrays."""
    rows = np.asarray(rows, dtype=np.int64)
    cols = np.asarray(cols, dtype=np.int64)
    values = np.asarray(values, dtype=float)
    if not (rows.shape == cols.shape == values.shape):
        raise SpecrankError("triplet arrays must share one length")
    if rows.size and (rows.min() < 0 or rows.max() >= n_rows or cols.min() < 0 or cols.max() >= n_cols):
        raise SpecrankError("triplet index out of bounds")
    order = np.lexsort((cols, rows))
    rows, cols, values = rows[order], cols[order], values[order]
    if rows.size:
        keys = rows * n_cols + cols
        first = np.ones(keys.size, dtype=bool)
        first[1:] = keys[1:] != keys[:-1]
        starts = np.flatnonzero(first)
        values = np.add.reduceat(values, starts)
        rows, cols = rows[starts], cols[starts]
    indptr = np.zeros(n_rows + 1, dtype=np.int64)
    np.add.at(indptr, rows + 1, 1)
    np.cumsum(indptr, out=indptr)
    return indptr, cols.copy(), values.copy()


class SparseSymmetric(LinearOperator):
    """Symmetric sparse operator stored in compressed-row form.

    Built from coordinate triplets covering *both* triangles (file readers
    mirror one-triangle storage before getting here). Duplicate entries are
    summed; an asymmetric pattern or value set is rejected.
    """

    def __init__(self, n, rows, cols, values):
        self.n = int(n)
        self.indptr, self.indices, self.data = _coalesce_triplets(self.n, self.n, rows, cols, values)
        self._check_symmetry()

    def _check_symmetry(self):
        rows = np.repeat(np.arange(self.n, dtype=np.int64), np.diff(self.indptr))
        t_indptr, t_indices, t_data = _coalesce_triplets(self.n, self.n, self.indices, rows, self.data)
        if not (
            np.array_equal(t_indptr, self.indptr)
            and np.array_equal(t_indices, self.indices)
            and np.allclose(t_data, self.data, rtol=1e-12, atol=0.0)
        ):
            raise SpecrankError("sparse triplets do not describe a symmetric matrix")

    @property
    def nnz(self):
        return int(self.data.size)

    def _matvec(self, v):
        return kernels.csr_matvec(self.indptr, self.indices, self.data, v)

    def to_dense(self):
        out = np.zeros((self.n, self.n))
        rows = np.repeat(np.arange(self.n), np.diff(self.indptr))
        out[rows, self.indices] = self.data
        return out


class CsrFactor:
    """Rectangular sparse factor with forward and transposed products."""

    def __init__(self, shape, rows, cols, values):
        self.shape = (int(shape[0]), int(shape[1]))
        d, n = self.shape
        self.indptr, self.indices, self.data = _coalesce_triplets(d, n, rows, cols, values)
        rows_full = np.repeat(np.arange(d, dtype=np.int64), np.diff(self.indptr))
        self.t_indptr, self.t_indices, self.t_data = _coalesce_triplets(n, d, self.indices, rows_full, self.data)

    def matvec(self, v):
        return kernels.csr_matvec(self.indptr, self.indices, self.data, v)

    def rmatvec(self, u):
        return kernels.csr_matvec(self.t_indptr, self.t_indices, self.t_data, u)

    def to_dense(self):
        out = np.zeros(self.shape)
        rows = np.repeat(np.arange(self.shape[0]), np.diff(self.indptr))
        out[rows, self.indices] = self.data
        return out


class Gram(LinearOperator):
    """Implicit Gram product of a d x n factor X.

    ``side="xtx"`` represents X^T X (dimension n), ``side="xxt"`` represents
    X X^T (dimension d), and the default ``"auto"`` picks the smaller square,
    which has the same nonzero spectrum. The product matrix is never formed;
    each apply is two rectangular products.
    """

    def __init__(self, factor, side="auto"):
        if isinstance(factor, np.ndarray) or not hasattr(factor, "matvec"):
            factor = np.asarray(factor, dtype=float)
            if factor.ndim != 2:
                raise SpecrankError("Gram factor must be 2-D")
        self.factor = factor
        d, n = factor.shape
        if side == "auto":
            side = "xxt" if d < n else "xtx"
        if side not in ("xtx", "xxt"):
            raise SpecrankError(f"unknown Gram side {side!r}")
        self.side = side
        self.n = n if side == "xtx" else d

    def _forward(self, v):
        if isinstance(self.factor, np.ndarray):
            return self.factor @ v
        return self.factor.matvec(v)

    def _transposed(self, u):
        if isinstance(self.factor, np.ndarray):
            return self.factor.T @ u
        return self.factor.rmatvec(u)

    def _matvec(self, v):
        if self.side == "xtx":
            return self._transposed(self._forward(v))
        return self._forward(self._transposed(v))

    def to_dense(self):
        x = self.factor if isinstance(self.factor, np.ndarray) else self.factor.to_dense()
        return x.T @ x if self.side == "xtx" else x @ x.T


class ShiftedScaled(LinearOperator):
    """Affine wrapper (A - center I) / halfwidth around another operator."""

    def __init__(self, inner, center, halfwidth):
        if halfwidth <= 0:
            raise InvalidWindow(f"halfwidth must be positive, got {halfwidth}")
        self.inner = inner
        self.center = float(center)
        self.halfwidth = float(halfwidth)
        self.n = inner.n

    def _matvec(self, v):
        return (self.inner.apply(v) - self.center * v) / self.halfwidth

    def to_dense(self):
        dense = self.inner.to_dense()
        return (dense - self.center * np.eye(self.n)) / self.halfwidth


def shift_scale(op, lambda_min, lambda_max):
    """Wrap ``op`` so the window [lambda_min, lambda_max] maps onto [-1, 1].

    Eigenvalues of the result lie in [-1, 1] whenever the window bounds the
    true spectrum.
    """
    if not lambda_max > lambda_min:
        raise InvalidWindow(
            f"invalid spectral window: lambda_max ({lambda_max}) must exceed lambda_min ({lambda_min})"
        )
    center = 0.5 * (lambda_max + lambda_min)
    halfwidth = 0.5 * (lambda_max - lambda_min)
    return ShiftedScaled(op, center, halfwidth)


def gershgorin_range(op):
    """Gershgorin disc bounds (lo, hi), or None when the variant has no cheap entries."""
    if isinstance(op, Diagonal):
        return float(op.values.min()), float(op.values.max())
    if isinstance(op, DenseSymmetric):
        diag = np.diag(op.matrix)
        radius = np.abs(op.matrix).sum(axis=1) - np.abs(diag)
        return float((diag - radius).min()), float((diag + radius).max())
    if isinstance(op, SparseSymmetric):
        rows = np.repeat(np.arange(op.n), np.diff(op.indptr))
        diag = np.zeros(op.n)
        on_diag = rows == op.indices
        diag[rows[on_diag]] = op.data[on_diag]
        radius = np.zeros(op.n)
        np.add.at(radius, rows, np.abs(op.data))
        radius -= np.abs(diag)
        return float((diag - radius).min()), float((diag + radius).max())
    if isinstance(op, ShiftedScaled):
        inner = gershgorin_range(op.inner)
        if inner is not None:
            return (inner[0] - op.center) / op.halfwidth, (inner[1] - op.center) / op.halfwidth
    return None

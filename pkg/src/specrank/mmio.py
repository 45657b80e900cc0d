"""Matrix ingestion (Matrix Market exchange format) and result emission."""

import io
import json
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from specrank.dos import DosCurve
from specrank.errors import MatrixMarketError, SpecrankError
from specrank.linops import CsrFactor, DenseSymmetric, Diagonal, Gram, SparseSymmetric

__all__ = [
    "read_matrix_market",
    "write_matrix_market",
    "write_dos",
    "read_dos",
    "ReportDocument",
    "write_report",
    "read_report",
]


def _parse_header(line):
    tokens = line.strip().lower().split()
    if len(tokens) != 5 or tokens[0] != "%%matrixmarket" or tokens[1] != "matrix":
        raise MatrixMarketError(f"malformed header: {line.strip()!r}", line=1)
    layout, fmt, symmetry = tokens[2], tokens[3], tokens[4]
    if layout != "coordinate":
        raise MatrixMarketError(f"only coordinate layout is supported, got {layout!r}", line=1)
    if fmt != "real":
        raise MatrixMarketError(f"only real-valued matrices are supported, got {fmt!r}", line=1)
    if symmetry not in ("general", "symmetric"):
        raise MatrixMarketError(f"unsupported symmetry {symmetry!r}", line=1)
    return symmetry


def _parse_entries(lines, first_lineno, rows, cols, nnz):
    """Triplet arrays from entry lines; falls back to a slow scan to locate errors."""
    body = "\n".join(lines)
    try:
        table = np.loadtxt(io.StringIO(body), ndmin=2)
        if table.shape != (nnz, 3):
            raise ValueError
    except ValueError:
        for offset, raw in enumerate(lines):
            parts = raw.split()
            if len(parts) != 3:
                raise MatrixMarketError(
                    f"expected 'row col value', got {raw.strip()!r}", line=first_lineno + offset
                ) from None
            try:
                int(parts[0]), int(parts[1]), float(parts[2])
            except ValueError:
                raise MatrixMarketError(
                    f"non-numeric entry {raw.strip()!r}", line=first_lineno + offset
                ) from None
        raise MatrixMarketError("entry table has the wrong shape", line=first_lineno)
    i = table[:, 0].astype(np.int64)
    j = table[:, 1].astype(np.int64)
    v = table[:, 2]
    bad = np.flatnonzero((i < 1) | (i > rows) | (j < 1) | (j > cols))
    if bad.size:
        raise MatrixMarketError(
            f"index ({i[bad[0]]}, {j[bad[0]]}) out of bounds for {rows}x{cols}",
            line=first_lineno + int(bad[0]),
        )
    return i - 1, j - 1, v


def read_matrix_market(path):
    """Parse a Matrix Market file into a linear operator.

    Symmetric files have their stored triangle mirrored (diagonal entries
    are not duplicated). General square files whose assembled entries
    happen to be symmetric are accepted as symmetric; anything else
    (non-symmetric square or rectangular) is wrapped as the implicit Gram
    product over the smaller side, with a warning. Duplicate triplets are
    summed.
    """
    with open(path, "r") as handle:
        lines = handle.read().splitlines()
    if not lines:
        raise MatrixMarketError("empty file", line=1)
    symmetry = _parse_header(lines[0])

    lineno = 1
    while lineno < len(lines) and (lines[lineno].startswith("%") or not lines[lineno].strip()):
        lineno += 1
    if lineno >= len(lines):
        raise MatrixMarketError("missing size line", line=len(lines))
    parts = lines[lineno].split()
    try:
        rows, cols, nnz = (int(p) for p in parts)
        if len(parts) != 3:
            raise ValueError
    except ValueError:
        raise MatrixMarketError(f"malformed size line {lines[lineno]!r}", line=lineno + 1) from None

    entry_lines = [l for l in lines[lineno + 1 :] if l.strip()]
    if len(entry_lines) != nnz:
        raise MatrixMarketError(
            f"expected {nnz} entries, found {len(entry_lines)}", line=lineno + 2
        )
    if nnz == 0:
        i = j = np.zeros(0, dtype=np.int64)
        v = np.zeros(0)
    else:
        i, j, v = _parse_entries(entry_lines, lineno + 2, rows, cols, nnz)

    if symmetry == "symmetric":
        if rows != cols:
            raise MatrixMarketError("symmetric matrices must be square", line=lineno + 1)
        off = i != j
        return SparseSymmetric(
            rows,
            np.concatenate([i, j[off]]),
            np.concatenate([j, i[off]]),
            np.concatenate([v, v[off]]),
        )

    if rows == cols:
        try:
            return SparseSymmetric(rows, i, j, v)
        except SpecrankError:
            warnings.warn(
                f"{path}: square but not symmetric; wrapping as a Gram operator",
                stacklevel=2,
            )
    else:
        warnings.warn(
            f"{path}: rectangular input; wrapping as a Gram operator of the smaller side",
            stacklevel=2,
        )
    return Gram(CsrFactor((rows, cols), i, j, v))


def _symmetric_triplets(op):
    """Lower-triangle (row, col, value) arrays of a symmetric operator."""
    if isinstance(op, Diagonal):
        idx = np.arange(op.n, dtype=np.int64)
        keep = op.values != 0
        return op.n, idx[keep], idx[keep], op.values[keep]
    if isinstance(op, SparseSymmetric):
        rows = np.repeat(np.arange(op.n, dtype=np.int64), np.diff(op.indptr))
        keep = rows >= op.indices
        return op.n, rows[keep], op.indices[keep], op.data[keep]
    if isinstance(op, DenseSymmetric):
        rows, cols = np.tril_indices(op.n)
        values = op.matrix[rows, cols]
        keep = values != 0
        return op.n, rows[keep].astype(np.int64), cols[keep].astype(np.int64), values[keep]
    if isinstance(op, np.ndarray):
        return _symmetric_triplets(DenseSymmetric(op))
    raise SpecrankError(f"cannot write {type(op).__name__} as a symmetric Matrix Market file")


def write_matrix_market(op, path, comment=None):
    """Write a symmetric operator in coordinate/real/symmetric form (lower triangle)."""
    n, rows, cols, values = _symmetric_triplets(op)
    with open(path, "w") as handle:
        handle.write("%%MatrixMarket matrix coordinate real symmetric\n")
        if comment:
            for part in comment.splitlines():
                handle.write(f"% {part}\n")
        handle.write(f"{n} {n} {values.size}\n")
        np.savetxt(handle, np.column_stack([rows + 1, cols + 1, values]), fmt="%d %d %.17g")


def write_dos(curve, path, format="csv"):
    """Emit a density curve as CSV (columns t, phi) or JSON (with metadata)."""
    if format == "csv":
        with open(path, "w") as handle:
            handle.write("t,phi\n")
            for t, phi in zip(curve.grid, curve.density):
                handle.write(f"{t:.17g},{phi:.17g}\n")
    elif format == "json":
        payload = {
            "t": [float(x) for x in curve.grid],
            "phi": [float(x) for x in curve.density],
            "meta": _jsonable(curve.meta),
        }
        with open(path, "w") as handle:
            json.dump(payload, handle, sort_keys=True, indent=2)
            handle.write("\n")
    else:
        raise SpecrankError(f"unknown density format {format!r}")


def read_dos(path):
    """Read a density curve written by ``write_dos`` (format by extension or sniffing)."""
    with open(path, "r") as handle:
        text = handle.read()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        payload = json.loads(text)
        return DosCurve(
            grid=np.asarray(payload["t"], dtype=float),
            density=np.asarray(payload["phi"], dtype=float),
            meta=payload.get("meta", {}),
        )
    lines = [l for l in text.splitlines() if l.strip()]
    if not lines or lines[0].replace(" ", "") != "t,phi":
        raise SpecrankError(f"{path}: not a density file (expected 't,phi' header)")
    table = np.loadtxt(io.StringIO("\n".join(lines[1:])), delimiter=",", ndmin=2)
    return DosCurve(grid=table[:, 0], density=table[:, 1], meta={})


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [float(x) for x in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    return obj


@dataclass
class ReportDocument:
    """Everything one rank-estimation run produced, ready for JSON."""

    input: str
    method: str
    params: dict
    window: list
    threshold: dict
    rank: dict
    timings: dict
    dos: dict | None = None
    meta: dict = field(default_factory=dict)

    @classmethod
    def from_estimate(cls, estimate, input_descriptor, params, include_dos=False):
        threshold = {"eps": float(estimate.eps), "method": "manual", "tol": None}
        if estimate.threshold is not None:
            threshold["method"] = estimate.threshold.method
            threshold["tol"] = estimate.threshold.diagnostics.get("tol")
        dos = None
        if include_dos and estimate.dos is not None:
            dos = {
                "t": [float(x) for x in estimate.dos.grid],
                "phi": [float(x) for x in estimate.dos.density],
                "meta": _jsonable(estimate.dos.meta),
            }
        return cls(
            input=str(input_descriptor),
            method=estimate.method,
            params=_jsonable(params),
            window=[float(estimate.window[0]), float(estimate.window[1])],
            threshold=_jsonable(threshold),
            rank={
                "per_probe": [float(x) for x in estimate.series.per_probe],
                "running_mean": [float(x) for x in estimate.series.running_mean],
                "mean": float(estimate.mean),
            },
            timings={k: float(v) for k, v in estimate.timings.items()},
            dos=dos,
            meta=_jsonable(estimate.meta),
        )


def write_report(report, path):
    with open(path, "w") as handle:
        json.dump(asdict(report), handle, sort_keys=True, indent=2)
        handle.write("\n")


def read_report(path):
    with open(path, "r") as handle:
        payload = json.load(handle)
    return ReportDocument(**payload)

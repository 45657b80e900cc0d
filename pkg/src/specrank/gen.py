"""Synthetic matrices with known spectral structure for experiments and tests."""

from dataclasses import dataclass, field

import numpy as np

from specrank.errors import InvalidConfig
from specrank.linops import DenseSymmetric, Diagonal

__all__ = ["GroundTruth", "hadamard_lowrank", "matern_covariance", "planted_spectrum"]


@dataclass
class GroundTruth:
    """What is known exactly about a generated matrix."""

    family: str
    n: int
    params: dict = field(default_factory=dict)
    true_rank: int | None = None
    snr_db: float | None = None
    eigenvalues: np.ndarray | None = None


# Stream ids disjoint from the probe streams (0..num_probes-1) and the
# bounds stream, so a matrix is never correlated with the probes run on it.
_GEN_STREAM = 1 << 33


def _rng(seed, stream=0):
    mask = (1 << 64) - 1
    return np.random.Generator(np.random.Philox(key=[seed & mask, (_GEN_STREAM + stream) & mask]))


def _sylvester_hadamard(n):
    h = np.ones((1, 1))
    while h.shape[0] < n:
        h = np.block([[h, h], [h, -h]])
    return h


def hadamard_lowrank(n, k, sigma=0.0, seed=0):
    """Rank-k projector from Hadamard columns, optionally noise-perturbed.

    The scaled Hadamard matrix has orthonormal columns, so the first k of
    them give A = H_k H_k^T with k unit eigenvalues and n-k zeros. Noise is
    an added Wishart term (sigma G)(sigma G)^T with G standard normal:
    it keeps the matrix PSD and its Frobenius norm concentrates at
    sqrt(2) n^1.5 sigma^2, which pins the reported SNR.
    """
    if n < 1 or (n & (n - 1)) != 0:
        raise InvalidConfig(f"n must be a power of two, got {n}")
    if not 1 <= k <= n:
        raise InvalidConfig(f"need 1 <= k <= n, got k={k}")
    h = _sylvester_hadamard(n) / np.sqrt(n)
    hk = h[:, :k]
    a = hk @ hk.T
    signal_fro = np.linalg.norm(a, "fro")
    snr_db = None
    eigenvalues = np.concatenate([np.zeros(n - k), np.ones(k)])
    if sigma > 0:
        g = _rng(seed).standard_normal((n, n))
        noise = (sigma * sigma) * (g @ g.T)
        a = a + noise
        snr_db = float(20.0 * np.log10(signal_fro / np.linalg.norm(noise, "fro")))
        eigenvalues = None
    truth = GroundTruth(
        family="hadamard",
        n=n,
        params={"k": k, "sigma": sigma, "seed": seed},
        true_rank=k,
        snr_db=snr_db,
        eigenvalues=eigenvalues,
    )
    return DenseSymmetric(a), truth


_MATERN_DEFAULT_LENGTH = {"1d": 0.05, "2d": 0.1}


def _matern_kernel(dist, nu, length_scale):
    if nu == 0.5:
        return np.exp(-dist / length_scale)
    if nu == 1.5:
        s = np.sqrt(3.0) * dist / length_scale
        return (1.0 + s) * np.exp(-s)
    if nu == 2.5:
        s = np.sqrt(5.0) * dist / length_scale
        return (1.0 + s + s * s / 3.0) * np.exp(-s)
    raise InvalidConfig(f"unsupported smoothness nu={nu}; closed forms exist for 1/2, 3/2, 5/2")


def matern_covariance(kind, dims, nu=0.5, length_scale=None):
    """Matern covariance matrix of a regular grid on the unit interval/square.

    ``kind`` is "1d" (dims = point count) or "2d" (dims = (rows, cols),
    points in row-major order). Only the half-integer smoothness values
    with closed-form kernels are supported. Diagonal entries are exactly 1
    and the matrix is PSD by construction.
    """
    kind = kind.lower()
    if kind not in ("1d", "2d"):
        raise InvalidConfig(f"kind must be '1d' or '2d', got {kind!r}")
    if length_scale is None:
        length_scale = _MATERN_DEFAULT_LENGTH[kind]
    if length_scale <= 0:
        raise InvalidConfig(f"length_scale must be positive, got {length_scale}")
    if kind == "1d":
        n = int(dims)
        if n < 1:
            raise InvalidConfig("1d grid needs at least one point")
        points = np.linspace(0.0, 1.0, n)[:, None]
    else:
        p, q = (int(d) for d in dims)
        if p < 1 or q < 1:
            raise InvalidConfig("2d grid needs positive dimensions")
        xs = np.linspace(0.0, 1.0, p) if p > 1 else np.zeros(1)
        ys = np.linspace(0.0, 1.0, q) if q > 1 else np.zeros(1)
        points = np.stack(np.meshgrid(xs, ys, indexing="ij"), axis=-1).reshape(p * q, 2)
    diff = points[:, None, :] - points[None, :, :]
    dist = np.sqrt((diff * diff).sum(axis=-1))
    return DenseSymmetric(_matern_kernel(dist, nu, length_scale))


def planted_spectrum(eigenvalues, rotate=False, seed=0):
    """Operator with exactly the given eigenvalues.

    Without rotation this is the diagonal matrix; with rotation it is
    conjugated by a product of five random Householder reflectors, dense
    but with the identical spectrum.
    """
    eigenvalues = np.asarray(eigenvalues, dtype=float)
    if eigenvalues.ndim != 1 or eigenvalues.size == 0:
        raise InvalidConfig("eigenvalue list must be nonempty")
    truth = GroundTruth(
        family="planted",
        n=eigenvalues.size,
        params={"rotate": bool(rotate), "seed": seed},
        eigenvalues=np.sort(eigenvalues),
    )
    if not rotate:
        return Diagonal(eigenvalues), truth
    rng = _rng(seed, stream=1)
    a = np.diag(eigenvalues)
    for _ in range(5):
        u = rng.standard_normal(eigenvalues.size)
        u /= np.linalg.norm(u)
        # Conjugate by H = I - 2 u u^T, one rank-1 update per side.
        a -= 2.0 * np.outer(a @ u, u)
        a -= 2.0 * np.outer(u, u @ a)
    a = 0.5 * (a + a.T)
    return DenseSymmetric(a), truth

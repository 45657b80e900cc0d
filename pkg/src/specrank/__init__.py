"""Matrix-free numerical rank estimation from approximate spectral densities.

Two estimators share one workflow: approximate the spectral density of a
symmetric PSD operator from matrix-vector products only (Chebyshev kernel
polynomial method, or Lanczos quadrature), locate the gap separating
noise-level eigenvalues from relevant ones on that density, and integrate
the density above the cutoff to get the approximate rank. A dense
eigensolver oracle validates everything at desk scale.
"""

from specrank.dos import DosCurve
from specrank.gen import GroundTruth, hadamard_lowrank, matern_covariance, planted_spectrum
from specrank.kernels import USING_COMPILED
from specrank.kpm import (
    ChebyshevMoments,
    DampingKind,
    chebyshev_moments,
    count_eigs_kpm,
    damping_factors,
    evaluate_dos,
    exact_moments,
    rank_kpm,
    step_coeffs,
)
from specrank.lanczos import RitzSpectrum, TridiagonalMatrix, lanczos, spectrum_bounds, tridiag_eigen
from specrank.ldos import (
    CdosCurve,
    RitzData,
    cdos,
    collect_ritz,
    count_eigs_lanczos,
    estimate_rank_lanczos,
    evaluate_dos_lanczos,
    rank_lanczos,
)
from specrank.linops import (
    DenseSymmetric,
    Diagonal,
    Gram,
    LinearOperator,
    ShiftedScaled,
    SparseSymmetric,
    shift_scale,
)
from specrank.mmio import (
    ReportDocument,
    read_dos,
    read_matrix_market,
    read_report,
    write_dos,
    write_matrix_market,
    write_report,
)
from specrank.oracle import ExactSpectrum, dense_eigs, exact_count, exact_dos
from specrank.probe import Distribution, ProbeConfig, SampleSeries, generate_probes, running_average
from specrank.results import RankEstimate
from specrank.threshold import (
    ThresholdResult,
    select_eps_dos,
    select_eps_tau,
    select_eps_valley_midpoint,
)

__version__ = "0.1.0"

__all__ = [
    "CdosCurve",
    "ChebyshevMoments",
    "DampingKind",
    "DenseSymmetric",
    "Diagonal",
    "Distribution",
    "DosCurve",
    "ExactSpectrum",
    "Gram",
    "GroundTruth",
    "LinearOperator",
    "ProbeConfig",
    "RankEstimate",
    "ReportDocument",
    "RitzData",
    "RitzSpectrum",
    "SampleSeries",
    "ShiftedScaled",
    "SparseSymmetric",
    "ThresholdResult",
    "TridiagonalMatrix",
    "USING_COMPILED",
    "cdos",
    "chebyshev_moments",
    "collect_ritz",
    "count_eigs_kpm",
    "count_eigs_lanczos",
    "damping_factors",
    "dense_eigs",
    "estimate_rank_lanczos",
    "evaluate_dos",
    "evaluate_dos_lanczos",
    "exact_count",
    "exact_dos",
    "exact_moments",
    "generate_probes",
    "hadamard_lowrank",
    "lanczos",
    "matern_covariance",
    "planted_spectrum",
    "rank_kpm",
    "rank_lanczos",
    "read_dos",
    "read_matrix_market",
    "read_report",
    "running_average",
    "select_eps_dos",
    "select_eps_tau",
    "select_eps_valley_midpoint",
    "shift_scale",
    "spectrum_bounds",
    "step_coeffs",
    "tridiag_eigen",
    "write_dos",
    "write_matrix_market",
    "write_report",
    "__version__",
]

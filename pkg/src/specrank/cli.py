"""Command-line front end.

Subcommands: rank, dos, threshold, gen, oracle. Exit codes: 0 success,
2 usage error, 3 no detectable gap (diagnostics written), 4 input or
parse error.
"""

import argparse
import json
import os
import sys

import numpy as np

from specrank import gen as _gen
from specrank import kpm as _kpm
from specrank import ldos as _ldos
from specrank import mmio
from specrank import oracle as _oracle
from specrank import threshold as _threshold
from specrank.errors import (
    InvalidConfig,
    InvalidInterval,
    InvalidWindow,
    MatrixMarketError,
    NoGapError,
    OracleCapError,
    SpecrankError,
)
from specrank.lanczos import spectrum_bounds
from specrank.linops import shift_scale
from specrank.probe import Distribution, ProbeConfig, generate_probes

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NO_GAP = 3
EXIT_INPUT = 4

_DAMPING = {
    "jackson": _kpm.DampingKind.JACKSON,
    "sigma": _kpm.DampingKind.LANCZOS_SIGMA,
    "none": _kpm.DampingKind.NONE,
}


def _default_threads():
    env = os.environ.get("SPECRANK_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _add_common(parser):
    parser.add_argument("--method", choices=["kpm", "lanczos"], default="lanczos")
    parser.add_argument("-m", type=int, default=50, dest="m",
                        help="polynomial degree / Lanczos steps (default 50)")
    parser.add_argument("--nv", type=int, default=30, help="number of probe vectors (default 30)")
    parser.add_argument("--damping", choices=sorted(_DAMPING), default="jackson")
    parser.add_argument("--dist", choices=["gaussian", "rademacher"], default="gaussian")
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--grid", type=int, default=400, help="density grid points (default 400)")
    parser.add_argument("--tol", type=float, default=_threshold.DEFAULT_TOL,
                        help="slope tolerance for threshold selection (default -0.01)")
    parser.add_argument("--threads", type=int, default=None,
                        help="probe worker count (default: SPECRANK_THREADS or all cores)")


def build_parser():
    parser = argparse.ArgumentParser(prog="specrank",
                                     description="Matrix-free numerical rank estimation")
    sub = parser.add_subparsers(dest="command", required=True)

    p_rank = sub.add_parser("rank", help="estimate the numerical rank of a matrix")
    p_rank.add_argument("--in", dest="path", required=True, help="Matrix Market input")
    _add_common(p_rank)
    p_rank.add_argument("--eps", type=float, default=None,
                        help="cutoff; skips automatic threshold selection")
    p_rank.add_argument("--strategy", choices=["valley", "deriv", "tau"], default="valley")
    p_rank.add_argument("--report", default=None, help="write a JSON report here")
    p_rank.add_argument("--with-dos", action="store_true", help="embed density samples in the report")

    p_dos = sub.add_parser("dos", help="emit a spectral density curve")
    p_dos.add_argument("--in", dest="path", required=True)
    _add_common(p_dos)
    p_dos.add_argument("--blur", type=float, default=None, help="Gaussian blur width (lanczos only)")
    p_dos.add_argument("--out", required=True)
    p_dos.add_argument("--format", choices=["csv", "json"], default=None,
                       help="default: by --out extension")

    p_thr = sub.add_parser("threshold", help="select a cutoff from a density curve")
    p_thr.add_argument("--dos", default=None, help="density file from the dos subcommand")
    p_thr.add_argument("--in", dest="path", default=None,
                       help="matrix input (required for --strategy tau)")
    p_thr.add_argument("--strategy", choices=["deriv", "valley", "tau"], default="valley")
    p_thr.add_argument("--tol", type=float, default=_threshold.DEFAULT_TOL)
    p_thr.add_argument("-m", type=int, default=50, dest="m")
    p_thr.add_argument("--nv", type=int, default=30)
    p_thr.add_argument("--seed", type=int, default=42)
    p_thr.add_argument("--threads", type=int, default=None)

    p_gen = sub.add_parser("gen", help="generate a synthetic test matrix")
    p_gen.add_argument("--family", choices=["hadamard", "matern1d", "matern2d", "planted"],
                       required=True)
    p_gen.add_argument("--n", type=int, default=2048, help="dimension (hadamard/matern1d)")
    p_gen.add_argument("--k", type=int, default=128, help="rank of the hadamard signal part")
    p_gen.add_argument("--sigma", type=float, default=0.0, help="hadamard noise level")
    p_gen.add_argument("--rows", type=int, default=64, help="matern2d grid rows")
    p_gen.add_argument("--cols", type=int, default=64, help="matern2d grid cols")
    p_gen.add_argument("--nu", type=float, default=None, help="matern smoothness (default 0.5)")
    p_gen.add_argument("--length-scale", type=float, default=None)
    p_gen.add_argument("--eigs-file", default=None,
                       help="planted: text file, one eigenvalue per line")
    p_gen.add_argument("--rotate", action="store_true", help="planted: conjugate by reflectors")
    p_gen.add_argument("--seed", type=int, default=42)
    p_gen.add_argument("--out", required=True)

    p_orc = sub.add_parser("oracle", help="exact dense eigencount (desk scale only)")
    p_orc.add_argument("--in", dest="path", required=True)
    p_orc.add_argument("--a", type=float, default=None)
    p_orc.add_argument("--b", type=float, default=None)
    p_orc.add_argument("--cap", type=int, default=_oracle.DEFAULT_CAP)

    return parser


def _probe_config(args):
    dist = Distribution.RADEMACHER if args.dist == "rademacher" else Distribution.GAUSSIAN
    return ProbeConfig(num_probes=args.nv, distribution=dist, seed=args.seed)


def _run_estimator(op, args, eps=None, strategy="valley"):
    threads = args.threads if args.threads is not None else _default_threads()
    config = _probe_config(args)
    if args.method == "kpm":
        if strategy == "tau":
            raise InvalidConfig("--strategy tau applies only to --method lanczos")
        return _kpm.rank_kpm(
            op,
            degree=args.m,
            config=config,
            damping=_DAMPING[args.damping],
            eps=eps,
            strategy=strategy,
            tol=args.tol,
            grid_points=args.grid,
            threads=threads,
        )
    return _ldos.estimate_rank_lanczos(
        op,
        steps=args.m,
        config=config,
        eps=eps,
        strategy=strategy,
        tol=args.tol,
        grid_points=args.grid,
        threads=threads,
    )


def _cmd_rank(args):
    op = mmio.read_matrix_market(args.path)
    estimate = _run_estimator(op, args, eps=args.eps, strategy=args.strategy)
    params = {
        "method": args.method, "m": args.m, "nv": args.nv, "damping": args.damping,
        "seed": args.seed, "tol": args.tol, "strategy": args.strategy,
        "eps_supplied": args.eps, "dist": args.dist, "grid": args.grid,
    }
    report = mmio.ReportDocument.from_estimate(estimate, args.path, params,
                                               include_dos=args.with_dos)
    if args.report:
        mmio.write_report(report, args.report)
    print(f"rank mean: {estimate.mean:.4f}")
    print(f"eps: {estimate.eps:.6g} ({report.threshold['method']})")
    print(f"window: [{estimate.window[0]:.6g}, {estimate.window[1]:.6g}]")
    for phase, seconds in estimate.timings.items():
        print(f"time {phase}: {seconds:.3f}s")
    return EXIT_OK


def _cmd_dos(args):
    op = mmio.read_matrix_market(args.path)
    threads = args.threads if args.threads is not None else _default_threads()
    config = _probe_config(args)
    probes = generate_probes(op.n, config)
    if args.method == "kpm":
        lo, hi = spectrum_bounds(op, assume_psd=True, seed=args.seed)
        mom = _kpm.chebyshev_moments(shift_scale(op, lo, hi), args.m, probes, threads=threads)
        curve = _kpm.evaluate_dos(mom, damping=_DAMPING[args.damping], grid_points=args.grid)
    else:
        data = _ldos.collect_ritz(op, args.m, probes, threads=threads)
        curve = _ldos.evaluate_dos_lanczos(data, grid_points=args.grid, blur=args.blur)
    fmt = args.format or ("json" if args.out.endswith(".json") else "csv")
    mmio.write_dos(curve, args.out, format=fmt)
    print(f"wrote {args.out} ({curve.grid.size} samples, integral {curve.integral():.4f})")
    return EXIT_OK


def _cmd_threshold(args):
    if args.strategy == "tau":
        if not args.path:
            raise InvalidConfig("--strategy tau needs --in MATRIX (weights come from Lanczos runs)")
        op = mmio.read_matrix_market(args.path)
        threads = args.threads if args.threads is not None else _default_threads()
        probes = generate_probes(op.n, ProbeConfig(num_probes=args.nv, seed=args.seed))
        data = _ldos.collect_ritz(op, args.m, probes, threads=threads)
        result = _threshold.select_eps_tau(data)
    else:
        if not args.dos:
            raise InvalidConfig("--dos FILE is required for strategies deriv and valley")
        curve = mmio.read_dos(args.dos)
        if args.strategy == "valley":
            result = _threshold.select_eps_valley_midpoint(curve, tol=args.tol)
        else:
            result = _threshold.select_eps_dos(curve, tol=args.tol)
    print(f"eps: {result.eps:.6g} ({result.method})")
    return EXIT_OK


def _cmd_gen(args):
    truth_extra = {}
    if args.family == "hadamard":
        op, truth = _gen.hadamard_lowrank(args.n, args.k, sigma=args.sigma, seed=args.seed)
    elif args.family == "matern1d":
        op = _gen.matern_covariance("1d", args.n, nu=args.nu if args.nu is not None else 0.5,
                                    length_scale=args.length_scale)
        truth = _gen.GroundTruth(family="matern1d", n=op.n,
                                 params={"nu": args.nu if args.nu is not None else 0.5,
                                         "length_scale": args.length_scale})
    elif args.family == "matern2d":
        op = _gen.matern_covariance("2d", (args.rows, args.cols),
                                    nu=args.nu if args.nu is not None else 0.5,
                                    length_scale=args.length_scale)
        truth = _gen.GroundTruth(family="matern2d", n=op.n,
                                 params={"nu": args.nu if args.nu is not None else 0.5,
                                         "length_scale": args.length_scale,
                                         "rows": args.rows, "cols": args.cols})
    else:
        if not args.eigs_file:
            raise InvalidConfig("--family planted needs --eigs-file")
        eigenvalues = np.loadtxt(args.eigs_file, ndmin=1)
        op, truth = _gen.planted_spectrum(eigenvalues, rotate=args.rotate, seed=args.seed)

    mmio.write_matrix_market(op, args.out, comment=f"specrank gen --family {args.family}")
    sidecar = os.path.splitext(args.out)[0] + ".truth.json"
    payload = {
        "family": truth.family,
        "n": truth.n,
        "params": truth.params,
        "true_rank": truth.true_rank,
        "snr_db": truth.snr_db,
        "spectrum": None,
    }
    if truth.eigenvalues is not None:
        ev = np.sort(truth.eigenvalues)
        payload["spectrum"] = {
            "min": float(ev[0]),
            "max": float(ev[-1]),
            "eigenvalues": [float(x) for x in ev],
        }
    payload.update(truth_extra)
    with open(sidecar, "w") as handle:
        json.dump(payload, handle, sort_keys=True, indent=2)
        handle.write("\n")
    print(f"wrote {args.out} (n={truth.n}) and {sidecar}")
    if truth.snr_db is not None:
        print(f"realized SNR: {truth.snr_db:.2f} dB")
    return EXIT_OK


def _cmd_oracle(args):
    op = mmio.read_matrix_market(args.path)
    spectrum = _oracle.dense_eigs(op, cap=args.cap)
    ev = spectrum.eigenvalues
    print(f"n: {ev.size}")
    print(f"lambda_min: {ev[0]:.6g}")
    print(f"lambda_max: {ev[-1]:.6g}")
    print(f"trace: {ev.sum():.6g}")
    if args.a is not None and args.b is not None:
        count = _oracle.exact_count(spectrum, args.a, args.b)
        print(f"count in ({args.a:.6g}, {args.b:.6g}]: {count}")
    return EXIT_OK


_COMMANDS = {
    "rank": _cmd_rank,
    "dos": _cmd_dos,
    "threshold": _cmd_threshold,
    "gen": _cmd_gen,
    "oracle": _cmd_oracle,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except NoGapError as exc:
        diag_path = getattr(args, "report", None) or "specrank_nogap.json"
        payload = {"error": str(exc), "diagnostics": mmio._jsonable(exc.diagnostics)}
        try:
            with open(diag_path, "w") as handle:
                json.dump(payload, handle, sort_keys=True, indent=2)
            print(f"no gap detected; diagnostics written to {diag_path}", file=sys.stderr)
        except OSError:
            print(f"no gap detected: {exc}", file=sys.stderr)
        return EXIT_NO_GAP
    except (FileNotFoundError, IsADirectoryError, MatrixMarketError, OracleCapError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (InvalidConfig, InvalidInterval, InvalidWindow) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SpecrankError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

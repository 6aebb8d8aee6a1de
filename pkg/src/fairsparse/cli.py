"""Command-line entry point.

Subcommands: synth, fit, assumptions, witness, experiment, gamma-sweep,
real, debias. Exit codes: 0 success, 1 config error, 2 data error,
3 internal numeric failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from .altopt import FitConfig, fit, debias, solution_from_json
from .dataio import (PreprocessOptions, read_dataset_csv, write_column_map,
                     write_dataset_csv)
from .diagnostics import build_witness, check_assumptions, check_kkt, lambda_spectrum
from .errors import ConfigError, DataError, NumericError
from .fairlasso import SolverConfig, lambda_default
from .harness import (ExperimentGrid, cell_sample_count, run_assumption_sweep,
                      run_gamma_sensitivity, run_real_data,
                      run_recovery_experiment)
from .synthgen import GenerativeConfig, generate_dataset, make_ground_truth


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(v) for v in text.split(",") if v)


def _float_list(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.split(",") if v)


def _resolve_n(args, d: int) -> int:
    if args.n is not None:
        return args.n
    if args.beta is not None:
        return cell_sample_count(d, args.beta)
    raise ConfigError("provide --n or --beta")


def _resolve_lambda(args, d: int, n: int) -> float:
    if getattr(args, "lam", None) is not None:
        return args.lam
    return lambda_default(1.0, args.k, 1.0, d, n)


def _gamma_or(args, fallback: float = 2.0) -> float:
    return args.gamma if args.gamma is not None else fallback


def _dump_json(payload: dict, args) -> None:
    text = json.dumps(payload, indent=2) + "\n"
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "report.json"), "w",
                  encoding="utf-8") as fh:
            fh.write(text)
    sys.stdout.write(text)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--d", type=int, default=100)
    p.add_argument("--s", type=int, default=10)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--gamma", type=float, default=None,
                   help="bias magnitude (default 2.0; for `real`, the "
                        "half-range rule)")
    p.add_argument("--k", type=float, default=0.15)
    p.add_argument("--lambda", dest="lam", type=float, default=None,
                   help="override the default regularization level")
    p.add_argument("--runs", type=int, default=30)
    p.add_argument("--out", type=str, default=None)
    p.add_argument("--format", choices=("csv", "json"), default="json")
    p.add_argument("--svg", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fairsparse",
                     description="fair sparse regression with a hidden "
                                 "binary group attribute")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic dataset")
    _add_common(p)
    p.add_argument("--min-signal", type=float, default=0.75)

    p = sub.add_parser("fit", help="fit the alternating solver to a CSV dataset")
    _add_common(p)
    p.add_argument("--data", required=True)
    p.add_argument("--max-rounds", type=int, default=100)

    p = sub.add_parser("assumptions",
                       help="assumption diagnostics for a dataset or a "
                            "synthetic frequency sweep")
    _add_common(p)
    p.add_argument("--data", default=None)
    p.add_argument("--support", type=_int_list, default=None,
                   help="comma-separated 0-based support indices")
    p.add_argument("--n-grid", type=_int_list, default=None,
                   help="synthetic sweep over these sample counts")

    p = sub.add_parser("witness", help="primal-dual witness for a dataset")
    _add_common(p)
    p.add_argument("--data", required=True)
    p.add_argument("--truth", required=True,
                   help="truth JSON with z_star and support")

    p = sub.add_parser("experiment", help="recovery curves over a (d, beta) grid")
    _add_common(p)
    p.add_argument("--dims", type=_int_list, default=None,
                   help="comma-separated d values (default: --d)")
    p.add_argument("--betas", type=_float_list, default=(1.0, 1.4, 1.8, 2.0, 2.2))

    p = sub.add_parser("gamma-sweep", help="sensitivity to misspecified gamma")
    _add_common(p)
    p.add_argument("--gammas", type=_float_list,
                   default=(1.5, 1.75, 2.0, 2.25, 2.5))

    p = sub.add_parser("real", help="preprocess and fit a real CSV dataset")
    _add_common(p)
    p.add_argument("--data", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--drop", type=str, default="",
                   help="comma-separated columns to drop")
    p.add_argument("--no-standardize", action="store_true")
    p.add_argument("--no-dummy", action="store_true")

    p = sub.add_parser("debias", help="subtract the recovered group bias")
    _add_common(p)
    p.add_argument("--data", required=True)
    p.add_argument("--solution", required=True, help="solution JSON from fit")
    return parser


def _cmd_synth(args) -> int:
    n = _resolve_n(args, args.d)
    cfg = GenerativeConfig(d=args.d, s=args.s, n=n, gamma=_gamma_or(args),
                           k=args.k, min_signal=args.min_signal,
                           seed=args.seed)
    truth = make_ground_truth(cfg)
    dataset = generate_dataset(truth, cfg)
    out = args.out or "."
    os.makedirs(out, exist_ok=True)
    write_dataset_csv(dataset, os.path.join(out, "dataset.csv"))
    with open(os.path.join(out, "truth.json"), "w", encoding="utf-8") as fh:
        json.dump({
            "w_star": truth.w_star.tolist(),
            "z_star": truth.z_star.tolist(),
            "support": list(truth.support),
            "gamma": truth.gamma,
            "n": n, "d": args.d, "s": args.s, "k": args.k, "seed": args.seed,
        }, fh, indent=2)
        fh.write("\n")
    sys.stdout.write(f"wrote dataset.csv and truth.json to {out}\n")
    return 0


def _cmd_fit(args) -> int:
    dataset = read_dataset_csv(args.data)
    lam = _resolve_lambda(args, dataset.d, dataset.n)
    gamma = _gamma_or(args)
    cfg = FitConfig(solver=SolverConfig(lam=lam, k=args.k), gamma=gamma,
                    max_rounds=args.max_rounds)
    sol = fit(dataset, cfg)
    kkt = check_kkt(dataset, sol, gamma, lam)
    payload = sol.to_json_dict()
    payload["lam"] = lam
    payload["kkt"] = kkt.to_json_dict()
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "solution.json"), "w",
                  encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
    sys.stdout.write(json.dumps({
        "converged": sol.converged,
        "iterations": sol.iterations,
        "support_size": len(sol.support),
        "objective": sol.objective_trace[-1],
        "kkt_all_ok": kkt.all_ok,
    }, indent=2) + "\n")
    return 0


def _cmd_assumptions(args) -> int:
    if args.n_grid:
        rows = run_assumption_sweep(args.d, args.s, args.n_grid, args.runs,
                                    args.seed, out_dir=args.out)
        sys.stdout.write(json.dumps(rows, indent=2) + "\n")
        return 0
    if not args.data or args.support is None:
        raise ConfigError("need --data and --support, or --n-grid")
    dataset = read_dataset_csv(args.data)
    report = check_assumptions(dataset.X, args.support)
    _dump_json(report.to_json_dict(), args)
    return 0


def _cmd_witness(args) -> int:
    dataset = read_dataset_csv(args.data)
    with open(args.truth, "r", encoding="utf-8") as fh:
        truth = json.load(fh)
    lam = _resolve_lambda(args, dataset.d, dataset.n)
    report = build_witness(
        dataset,
        np.asarray(truth["z_star"], dtype=np.int64),
        truth["support"],
        truth.get("gamma", _gamma_or(args)),
        lam,
        w_star=np.asarray(truth["w_star"], dtype=np.float64)
        if "w_star" in truth else None,
    )
    spectrum = lambda_spectrum(report)
    payload = report.to_json_dict()
    payload["lam"] = lam
    payload["spectrum"] = spectrum.to_json_dict()
    _dump_json(payload, args)
    return 0


def _cmd_experiment(args) -> int:
    grid = ExperimentGrid(dims=args.dims or (args.d,), betas=args.betas,
                          runs=args.runs, s=args.s, gamma=_gamma_or(args),
                          k=args.k, lam=args.lam, seed=args.seed)
    points, _ = run_recovery_experiment(grid, out_dir=args.out or "out",
                                        svg=args.svg)
    for p in points:
        sys.stdout.write(
            f"d={p.d} beta={p.beta} n={p.n} "
            f"jaccard={p.mean_jaccard:.3f} exact_z={p.exact_z_rate:.3f}\n"
        )
    return 0


def _cmd_gamma_sweep(args) -> int:
    beta = args.beta if args.beta is not None else 2.2
    grid = ExperimentGrid(dims=(args.d,), betas=(beta,), runs=args.runs,
                          s=args.s, gamma=_gamma_or(args), k=args.k,
                          lam=args.lam, seed=args.seed)
    rows = run_gamma_sensitivity(grid, args.gammas, beta, args.d,
                                 out_dir=args.out)
    for row in rows:
        sys.stdout.write(
            f"gamma_hat={row['gamma_hat']} "
            f"jaccard={row['mean_jaccard']:.3f} "
            f"exact_z={row['exact_z_rate']:.3f}\n"
        )
    return 0


def _cmd_real(args) -> int:
    lam = args.lam if args.lam is not None else 0.15
    opts = PreprocessOptions(
        target_column=args.target,
        drop_columns=tuple(c for c in args.drop.split(",") if c),
        standardize=not args.no_standardize,
        dummy_encode=not args.no_dummy,
    )
    report, _, _, _ = run_real_data(args.data, opts, lam, gamma=args.gamma,
                                    out_dir=args.out)
    sys.stdout.write(json.dumps(report.to_json_dict(), indent=2) + "\n")
    return 0


def _cmd_debias(args) -> int:
    dataset = read_dataset_csv(args.data)
    with open(args.solution, "r", encoding="utf-8") as fh:
        sol = solution_from_json(fh.read())
    adjusted = debias(dataset.y, sol.z, _gamma_or(args))
    out = args.out or "."
    os.makedirs(out, exist_ok=True)
    path = os.path.join(out, "debiased.csv")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("y,debiased_y,z\n")
        for yi, di, zi in zip(dataset.y, adjusted, sol.z):
            fh.write(f"{yi!r},{di!r},{int(zi)}\n")
    sys.stdout.write(f"wrote {path}\n")
    return 0


_HANDLERS = {
    "synth": _cmd_synth,
    "fit": _cmd_fit,
    "assumptions": _cmd_assumptions,
    "witness": _cmd_witness,
    "experiment": _cmd_experiment,
    "gamma-sweep": _cmd_gamma_sweep,
    "real": _cmd_real,
    "debias": _cmd_debias,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _HANDLERS[args.command](args)
    except ConfigError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return 1
    except (DataError, FileNotFoundError) as exc:
        sys.stderr.write(f"data error: {exc}\n")
        return 2
    except NumericError as exc:
        sys.stderr.write(f"numeric failure: {exc}\n")
        return 3


if __name__ == "__main__":
    raise SystemExit(main())

"""Experiment harness: seeded recovery curves over (d, beta) grids, the
gamma-misspecification sweep, assumption-frequency sweeps, and the
real-data pipeline. Emits deterministic CSV tables (byte-identical for a
fixed root seed) and optional self-contained SVG line charts.

The sample count for a cell is ``n = round(10^beta * log d)`` with
natural log.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field, replace

import numpy as np

from .altopt import FitConfig, Solution, fit, debias
from .dataio import PreprocessOptions, load_csv, preprocess, write_column_map
from .diagnostics import check_assumptions
from .errors import ConfigError, NumericError
from .fairlasso import SolverConfig, lambda_default
from .metrics import metric_exact_z, metric_exact_z_aligned, metric_jaccard
from .numkit import substream_seed
from .synthgen import GenerativeConfig, make_ground_truth, generate_dataset


def cell_sample_count(d: int, beta: float) -> int:
    """n = round(10^beta * log d), natural log."""
    if d < 2:
        raise ConfigError("need d >= 2")
    return int(round(10.0**beta * math.log(d)))


@dataclass(frozen=True)
class ExperimentGrid:
    dims: tuple[int, ...]
    betas: tuple[float, ...]
    runs: int = 30
    s: int = 10
    gamma: float = 2.0
    k: float = 0.15
    min_signal: float = 0.75
    lam: float | None = None     # None -> lambda_default(1, k, 1, d, n)
    rho: float = 1.0
    alpha: float = 1.0
    seed: int = 0
    max_rounds: int = 100
    solver_tol: float = 1e-8

    def __post_init__(self):
        if not self.dims or not self.betas:
            raise ConfigError("dims and betas must be non-empty")
        if self.runs < 1:
            raise ConfigError("runs must be >= 1")

    def lam_for(self, d: int, n: int) -> float:
        if self.lam is not None:
            return self.lam
        return lambda_default(self.rho, self.k, self.alpha, d, n)


@dataclass(frozen=True)
class CurvePoint:
    d: int
    beta: float
    n: int
    mean_jaccard: float
    exact_z_rate: float
    runs: int


@dataclass(frozen=True)
class RunRecord:
    d: int
    beta: float
    n: int
    run: int
    seed: int
    jaccard: float
    exact_z: int
    exact_z_aligned: int
    converged: bool
    iterations: int
    lam: float


def _run_seed(root: int, d: int, beta: float, run: int) -> int:
    s = substream_seed(root, d)
    s = substream_seed(s, int(round(beta * 1000)))
    return substream_seed(s, run)


def run_single(grid: ExperimentGrid, d: int, beta: float, run: int,
               gamma_hat: float | None = None):
    """One seeded instance: generate, fit, score. Returns
    (RunRecord, GroundTruth, Dataset, Solution)."""
    n = cell_sample_count(d, beta)
    seed = _run_seed(grid.seed, d, beta, run)
    gen = GenerativeConfig(d=d, s=grid.s, n=n, gamma=grid.gamma, k=grid.k,
                           min_signal=grid.min_signal, seed=seed)
    truth = make_ground_truth(gen)
    dataset = generate_dataset(truth, gen)
    lam = grid.lam_for(d, n)
    gamma_fit = grid.gamma if gamma_hat is None else gamma_hat
    cfg = FitConfig(
        solver=SolverConfig(lam=lam, tol=grid.solver_tol,
                            rho=grid.rho, alpha=grid.alpha, k=grid.k),
        gamma=gamma_fit,
        max_rounds=grid.max_rounds,
    )
    try:
        sol = fit(dataset, cfg)
        record = RunRecord(
            d=d, beta=beta, n=n, run=run, seed=seed,
            jaccard=metric_jaccard(truth.support, sol.support),
            exact_z=metric_exact_z(truth.z_star, sol.z),
            exact_z_aligned=metric_exact_z_aligned(truth.z_star, sol.z),
            converged=sol.converged,
            iterations=sol.iterations,
            lam=lam,
        )
    except NumericError:
        sol = None
        record = RunRecord(d=d, beta=beta, n=n, run=run, seed=seed,
                           jaccard=0.0, exact_z=0, exact_z_aligned=0,
                           converged=False, iterations=0, lam=lam)
    return record, truth, dataset, sol


def run_recovery_experiment(grid: ExperimentGrid, out_dir=None,
                            svg: bool = False):
    """Full (d, beta, run) sweep. Returns (curve points, run records) and
    optionally writes curves.csv / runs.csv / SVG charts to out_dir."""
    records: list[RunRecord] = []
    points: list[CurvePoint] = []
    for d in grid.dims:
        for beta in grid.betas:
            cell = [run_single(grid, d, beta, run)[0] for run in range(grid.runs)]
            records.extend(cell)
            points.append(CurvePoint(
                d=d, beta=beta, n=cell[0].n,
                mean_jaccard=float(np.mean([r.jaccard for r in cell])),
                exact_z_rate=float(np.mean([r.exact_z for r in cell])),
                runs=grid.runs,
            ))
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        _write_curves_csv(points, grid, os.path.join(out_dir, "curves.csv"))
        _write_runs_csv(records, grid, os.path.join(out_dir, "runs.csv"))
        if svg:
            _write_curve_svgs(points, grid, out_dir)
    return points, records


def run_gamma_sensitivity(grid: ExperimentGrid, gamma_grid, beta: float,
                          d: int, out_dir=None):
    """Fit with misspecified bias estimates against data generated at the
    grid's true gamma. Seeds are fixed per run index so every gamma_hat
    sees the same instances. Returns rows of
    (gamma_hat, mean_jaccard, exact_z_rate, runs)."""
    rows = []
    details: list[tuple[float, RunRecord]] = []
    for gamma_hat in gamma_grid:
        if gamma_hat <= 0:
            raise ConfigError("gamma_hat must be > 0")
        cell = [run_single(grid, d, beta, run, gamma_hat=gamma_hat)[0]
                for run in range(grid.runs)]
        details.extend((gamma_hat, rec) for rec in cell)
        rows.append({
            "gamma_hat": gamma_hat,
            "mean_jaccard": float(np.mean([r.jaccard for r in cell])),
            "exact_z_rate": float(np.mean([r.exact_z for r in cell])),
            "runs": grid.runs,
        })
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        path = os.path.join(out_dir, "gamma_sweep.csv")
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("gamma_hat,mean_jaccard,exact_z_rate,runs,"
                     "d,beta,n,true_gamma,s,k,seed\n")
            n = cell_sample_count(d, beta)
            for row in rows:
                fh.write(",".join([
                    repr(float(row["gamma_hat"])), repr(row["mean_jaccard"]),
                    repr(row["exact_z_rate"]), str(row["runs"]),
                    str(d), repr(float(beta)), str(n), repr(float(grid.gamma)),
                    str(grid.s), repr(float(grid.k)), str(grid.seed),
                ]) + "\n")
    return rows


def run_assumption_sweep(d: int, s: int, n_grid, runs: int, seed: int,
                         out_dir=None):
    """Pass frequencies of the two assumptions over seeded standard-normal
    designs, per sample count."""
    rows = []
    for n in n_grid:
        if n < 2:
            raise ConfigError("sample counts must be >= 2")
        a1 = a2 = 0
        for run in range(runs):
            inst_seed = _run_seed(seed, d, float(n), run)
            gen = GenerativeConfig(d=d, s=s, n=n, seed=inst_seed)
            truth = make_ground_truth(gen)
            dataset = generate_dataset(truth, gen)
            report = check_assumptions(dataset.X, truth.support)
            a1 += report.a1_pass
            a2 += report.a2_pass
        rows.append({"n": n, "a1_freq": a1 / runs, "a2_freq": a2 / runs,
                     "runs": runs})
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        path = os.path.join(out_dir, "assumptions.csv")
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("n,a1_freq,a2_freq,runs,d,s,seed\n")
            for row in rows:
                fh.write(",".join([
                    str(row["n"]), repr(row["a1_freq"]), repr(row["a2_freq"]),
                    str(row["runs"]), str(d), str(s), str(seed),
                ]) + "\n")
    return rows


@dataclass(frozen=True)
class RealDataReport:
    n: int
    d: int
    lam: float
    gamma: float
    mse: float
    group_sizes: tuple[int, int]       # (+1 count, -1 count)
    group_means: tuple[float, float]   # mean response by recovered group
    top_predictors: tuple[tuple[str, float], ...]
    converged: bool
    iterations: int

    def to_json_dict(self) -> dict:
        return {
            "n": self.n, "d": self.d, "lam": self.lam, "gamma": self.gamma,
            "mse": self.mse,
            "group_sizes": {"positive": self.group_sizes[0],
                            "negative": self.group_sizes[1]},
            "group_means": {"positive": self.group_means[0],
                            "negative": self.group_means[1]},
            "top_predictors": [{"name": n, "weight": w}
                               for n, w in self.top_predictors],
            "converged": self.converged,
            "iterations": self.iterations,
        }


def run_real_data(path, opts: PreprocessOptions, lam: float,
                  gamma: float | None = None, out_dir=None,
                  top_k: int = 10, max_rounds: int = 100):
    """Load, preprocess, fit, and summarize a real tabular dataset.

    ``gamma=None`` applies the half-range rule
    (max(y) - min(y)) / 2 on the preprocessed response. Returns
    (RealDataReport, Solution, Dataset, column map)."""
    table = load_csv(path)
    dataset, colmap = preprocess(table, opts)
    if gamma is None:
        gamma = (float(np.max(dataset.y)) - float(np.min(dataset.y))) / 2.0
    cfg = FitConfig(solver=SolverConfig(lam=lam), gamma=gamma,
                    max_rounds=max_rounds)
    sol = fit(dataset, cfg)

    resid = dataset.X @ sol.w + gamma * sol.z.astype(np.float64) - dataset.y
    mse = float(resid @ resid) / dataset.n
    pos = sol.z == 1
    group_sizes = (int(np.sum(pos)), int(np.sum(~pos)))
    group_means = (
        float(np.mean(dataset.y[pos])) if group_sizes[0] else math.nan,
        float(np.mean(dataset.y[~pos])) if group_sizes[1] else math.nan,
    )
    order = np.argsort(-np.abs(sol.w), kind="stable")
    top = tuple((colmap[j], float(sol.w[j])) for j in order[:top_k]
                if sol.w[j] != 0.0)

    report = RealDataReport(
        n=dataset.n, d=dataset.d, lam=lam, gamma=gamma, mse=mse,
        group_sizes=group_sizes, group_means=group_means,
        top_predictors=top, converged=sol.converged,
        iterations=sol.iterations,
    )
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, "real_report.json"), "w",
                  encoding="utf-8") as fh:
            json.dump(report.to_json_dict(), fh, indent=2)
            fh.write("\n")
        with open(os.path.join(out_dir, "solution.json"), "w",
                  encoding="utf-8") as fh:
            fh.write(sol.to_json())
            fh.write("\n")
        write_column_map(colmap, os.path.join(out_dir, "column_map.json"))
        debiased = debias(dataset.y, sol.z, gamma)
        with open(os.path.join(out_dir, "debiased.csv"), "w",
                  encoding="utf-8", newline="\n") as fh:
            fh.write("y,debiased_y,z\n")
            for yi, di, zi in zip(dataset.y, debiased, sol.z):
                fh.write(f"{yi!r},{di!r},{int(zi)}\n")
    return report, sol, dataset, colmap


# ---------------------------------------------------------------------------
# emission helpers
# ---------------------------------------------------------------------------

def _write_curves_csv(points, grid: ExperimentGrid, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("d,beta,n,mean_jaccard,exact_z_rate,runs,"
                 "s,gamma,k,min_signal,lam,seed\n")
        for p in points:
            lam = grid.lam_for(p.d, p.n)
            fh.write(",".join([
                str(p.d), repr(float(p.beta)), str(p.n),
                repr(p.mean_jaccard), repr(p.exact_z_rate), str(p.runs),
                str(grid.s), repr(float(grid.gamma)), repr(float(grid.k)),
                repr(float(grid.min_signal)), repr(lam), str(grid.seed),
            ]) + "\n")


def _write_runs_csv(records, grid: ExperimentGrid, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("d,beta,n,run,seed,jaccard,exact_z,exact_z_aligned,"
                 "converged,iterations,lam,s,gamma,k,min_signal,root_seed\n")
        for r in records:
            fh.write(",".join([
                str(r.d), repr(float(r.beta)), str(r.n), str(r.run),
                str(r.seed), repr(r.jaccard), str(r.exact_z),
                str(r.exact_z_aligned), str(int(r.converged)),
                str(r.iterations), repr(r.lam), str(grid.s),
                repr(float(grid.gamma)), repr(float(grid.k)),
                repr(float(grid.min_signal)), str(grid.seed),
            ]) + "\n")


def _write_curve_svgs(points, grid: ExperimentGrid, out_dir) -> None:
    for metric, fname, title in (
        ("mean_jaccard", "curves_jaccard.svg", "support recovery"),
        ("exact_z_rate", "curves_exactz.svg", "attribute recovery"),
    ):
        series = {}
        for d in grid.dims:
            pts = [(p.beta, getattr(p, metric)) for p in points if p.d == d]
            series[f"d={d}"] = sorted(pts)
        svg_line_chart(series, os.path.join(out_dir, fname),
                       title=title, xlabel="beta", ylabel=metric)


_SVG_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


def svg_line_chart(series: dict, path, title: str = "", xlabel: str = "",
                   ylabel: str = "", width: int = 640, height: int = 420) -> None:
    """Minimal self-contained SVG line chart (no charting dependency).

    ``series`` maps a label to a list of (x, y) points.
    """
    margin = 60
    xs = [x for pts in series.values() for x, _ in pts]
    ys = [y for pts in series.values() for _, y in pts]
    if not xs:
        raise ConfigError("no points to plot")
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(0.0, min(ys)), max(1.0, max(ys))
    if x_hi == x_lo:
        x_hi = x_lo + 1.0

    def sx(x):
        return margin + (x - x_lo) / (x_hi - x_lo) * (width - 2 * margin)

    def sy(y):
        return height - margin - (y - y_lo) / (y_hi - y_lo) * (height - 2 * margin)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2}" y="24" text-anchor="middle" '
        f'font-size="16">{title}</text>',
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" '
        f'y2="{height - margin}" stroke="black"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" '
        f'y2="{height - margin}" stroke="black"/>',
        f'<text x="{width / 2}" y="{height - 16}" text-anchor="middle" '
        f'font-size="12">{xlabel}</text>',
        f'<text x="16" y="{height / 2}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 16 {height / 2})">{ylabel}</text>',
    ]
    for tick in (x_lo, (x_lo + x_hi) / 2, x_hi):
        parts.append(
            f'<text x="{sx(tick):.1f}" y="{height - margin + 18}" '
            f'text-anchor="middle" font-size="10">{tick:.2f}</text>'
        )
    for tick in (0.0, 0.5, 1.0):
        parts.append(
            f'<text x="{margin - 8}" y="{sy(tick):.1f}" text-anchor="end" '
            f'font-size="10">{tick:.1f}</text>'
        )
    for idx, (label, pts) in enumerate(series.items()):
        color = _SVG_COLORS[idx % len(_SVG_COLORS)]
        coords = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in pts)
        parts.append(f'<polyline points="{coords}" fill="none" '
                     f'stroke="{color}" stroke-width="2"/>')
        for x, y in pts:
            parts.append(f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="3" '
                         f'fill="{color}"/>')
        parts.append(
            f'<text x="{width - margin + 6}" y="{margin + 16 * idx}" '
            f'font-size="12" fill="{color}">{label}</text>'
        )
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(parts) + "\n")

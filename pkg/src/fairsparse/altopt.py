"""Alternating minimization between the lasso w-step and the closed-form
z-step, plus the debiasing transform.

Each round solves the weighted lasso against the shifted target
``y - gamma z`` (warm-started from the previous round) and then updates
z from the residual sign. Both half-steps are exact block minimizations,
so the recorded objective is non-increasing; iteration stops at an exact
sign fixpoint z_t == z_{t-1}.

Initialization: the default start is the identity lifted matrix, whose
first-column tail is the zero vector, so the first w-step is a plain
lasso on the unshifted response. A +/-1 vector can be supplied via
``z_init`` instead; the fixpoint characterization is
initialization-independent.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DimensionError
from .fairlasso import SolverConfig, solve_weighted_lasso
from .synthgen import Dataset
from .zstep import _z_step_core, rank_one_sign_z


@dataclass(frozen=True)
class FitConfig:
    solver: SolverConfig
    gamma: float
    max_rounds: int = 100
    z_init: np.ndarray | None = None

    def __post_init__(self):
        if self.gamma <= 0:
            raise ConfigError("gamma must be > 0")
        if self.max_rounds < 1:
            raise ConfigError("max_rounds must be >= 1")


@dataclass(frozen=True)
class Solution:
    w: np.ndarray                 # length d
    z: np.ndarray                 # length n, entries in {-1, +1} (int)
    Z: np.ndarray                 # (n+1) x (n+1) rank-one sign matrix
    objective_trace: np.ndarray   # one entry per round, non-increasing
    iterations: int
    converged: bool

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(np.flatnonzero(self.w).tolist())

    def to_json_dict(self) -> dict:
        return {
            "w": self.w.tolist(),
            "z": self.z.tolist(),
            "objective_trace": self.objective_trace.tolist(),
            "iterations": self.iterations,
            "converged": self.converged,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())


def solution_from_json(text: str) -> Solution:
    data = json.loads(text)
    z = np.asarray(data["z"], dtype=np.int64)
    return Solution(
        w=np.asarray(data["w"], dtype=np.float64),
        z=z,
        Z=rank_one_sign_z(z),
        objective_trace=np.asarray(data["objective_trace"], dtype=np.float64),
        iterations=int(data["iterations"]),
        converged=bool(data["converged"]),
    )


def fit(dataset: Dataset, cfg: FitConfig) -> Solution:
    """Run the alternating solver to a sign fixpoint.

    Hitting max_rounds without a fixpoint returns the last iterate with
    ``converged=False`` rather than raising.
    """
    X, y = dataset.X, dataset.y
    n, d = X.shape
    if cfg.z_init is None:
        z = np.zeros(n, dtype=np.int64)  # identity lifted start
    else:
        z = np.asarray(cfg.z_init, dtype=np.int64)
        if z.shape != (n,) or not np.all(np.abs(z) == 1):
            raise ConfigError("z_init must be a length-n vector of +/-1")

    gram = X.T @ X
    w = np.zeros(d)
    trace = []
    converged = False
    iterations = 0
    for _ in range(cfg.max_rounds):
        iterations += 1
        lasso = solve_weighted_lasso(
            X, y - cfg.gamma * z.astype(np.float64), cfg.solver, w0=w, gram=gram
        )
        w = lasso.w
        r = X @ w - y
        z_new, z_objective = _z_step_core(r, cfg.gamma, n)
        trace.append(z_objective + cfg.solver.lam * float(np.sum(np.abs(w))))
        if np.array_equal(z_new, z):
            converged = True
            z = z_new
            break
        z = z_new

    return Solution(
        w=w,
        z=z,
        Z=rank_one_sign_z(z),
        objective_trace=np.array(trace),
        iterations=iterations,
        converged=converged,
    )


def debias(y: np.ndarray, z: np.ndarray, gamma: float) -> np.ndarray:
    """Remove the recovered group bias: ``y - gamma z``."""
    y = np.asarray(y, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    if y.shape != z.shape:
        raise DimensionError(f"length mismatch y={y.shape}, z={z.shape}")
    return y - gamma * z

"""l1-regularized least squares by cyclic coordinate descent.

Solves ``min_w (1/n) ||X w - r||^2 + lam * ||w||_1`` with exact
coordinate minimization. This is both the plain sparse-regression
baseline and the w-step of the alternating solver (with the shifted
target ``r = y - gamma z``).

Bookkeeping convention: the quadratic term carries 1/n (not 1/(2n)), so
the gradient is (2/n) X^T (X w - r) and the coordinate update is
``w_j = soft_threshold(rho_j, n*lam/2) / ||X_j||^2`` with
``rho_j = X_j^T (r - X w + X_j w_j)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DimensionError

_SMALL_D_PYTHON_LOOP = 32   # below this, run the sweep on python floats
_REFRESH_SWEEPS = 50        # recompute cached products to cap drift


@dataclass(frozen=True)
class SolverConfig:
    """Coordinate-descent settings plus the theory constants for lambda."""

    lam: float                  # regularization level
    tol: float = 1e-8           # stop when max coordinate change <= tol
    max_sweeps: int = 10000
    rho: float = 1.0            # sub-Gaussian design parameter
    alpha: float = 1.0          # incoherence margin, in (0, 1]
    k: float = 0.15             # noise scale used by lambda_default

    def __post_init__(self):
        if self.lam < 0:
            raise ConfigError("lam must be >= 0")
        if self.tol <= 0:
            raise ConfigError("tol must be > 0")
        if self.max_sweeps < 1:
            raise ConfigError("max_sweeps must be >= 1")
        if not (0 < self.alpha <= 1):
            raise ConfigError("alpha must be in (0, 1]")


@dataclass(frozen=True)
class LassoFit:
    """Solver output; ``converged`` is False when max_sweeps ran out."""

    w: np.ndarray
    sweeps: int
    converged: bool
    objective_trace: np.ndarray  # objective after each sweep


def soft_threshold(a: float, t: float) -> float:
    """sign(a) * max(|a| - t, 0)."""
    if t < 0:
        raise ConfigError("threshold must be >= 0")
    if a > t:
        return a - t
    if a < -t:
        return a + t
    return 0.0


def lambda_default(rho: float, k: float, alpha: float, d: int, n: int) -> float:
    """Theoretical regularization level (128 rho k / alpha) * sqrt(log d) / n.

    Natural log, implemented literally. Scales like 1/n and 1/alpha.
    """
    if d < 2:
        raise ConfigError(f"need d >= 2 for log d, got d={d}")
    if rho <= 0 or k <= 0 or alpha <= 0 or n <= 0:
        raise ConfigError("rho, k, alpha, n must all be > 0")
    return (128.0 * rho * k / alpha) * math.sqrt(math.log(d)) / n


def _sweep_python(G, c, w, q, thr, order):
    """One cyclic sweep on python floats (fast for small d)."""
    delta_max = 0.0
    for j in order:
        gjj = G[j][j]
        if gjj == 0.0:
            continue
        wj = w[j]
        rho_j = c[j] - (q[j] - gjj * wj)
        wn = soft_threshold(rho_j, thr) / gjj
        if wn != wj:
            step = wn - wj
            Gj = G[j]
            for i in range(len(q)):
                q[i] += Gj[i] * step
            w[j] = wn
            change = abs(step)
            if change > delta_max:
                delta_max = change
    return delta_max


def _sweep_numpy(G, c, w, q, thr, order):
    delta_max = 0.0
    for j in order:
        gjj = G[j, j]
        if gjj == 0.0:
            continue
        wj = w[j]
        rho_j = c[j] - (q[j] - gjj * wj)
        wn = soft_threshold(rho_j, thr) / gjj
        if wn != wj:
            q += G[:, j] * (wn - wj)
            w[j] = wn
            change = abs(wn - wj)
            if change > delta_max:
                delta_max = change
    return delta_max


def solve_weighted_lasso(X: np.ndarray, r: np.ndarray, cfg: SolverConfig,
                         w0: np.ndarray | None = None,
                         gram: np.ndarray | None = None) -> LassoFit:
    """Cyclic coordinate descent on (1/n)||X w - r||^2 + lam ||w||_1.

    Coordinates are visited in fixed order 0..d-1 each sweep; iteration
    stops when the largest coordinate change in a sweep is <= cfg.tol.
    ``gram`` may supply a precomputed X^T X (reused across calls with the
    same design). Exceeding max_sweeps is reported via the converged
    flag, not an exception.
    """
    X = np.asarray(X, dtype=np.float64)
    r = np.asarray(r, dtype=np.float64)
    if X.ndim != 2 or r.ndim != 1 or X.shape[0] != r.shape[0]:
        raise DimensionError(
            f"inconsistent shapes X={X.shape}, r={r.shape}"
        )
    n, d = X.shape
    G = X.T @ X if gram is None else np.asarray(gram, dtype=np.float64)
    if G.shape != (d, d):
        raise DimensionError(f"gram matrix shape {G.shape} does not match d={d}")
    c = X.T @ r
    rtr = float(r @ r)
    thr = n * cfg.lam / 2.0

    w = np.zeros(d) if w0 is None else np.array(w0, dtype=np.float64)
    if w.shape != (d,):
        raise DimensionError(f"warm start shape {w.shape} does not match d={d}")

    order = range(d)
    use_python = d <= _SMALL_D_PYTHON_LOOP
    if use_python:
        G_l = G.tolist()
        c_l = c.tolist()
        w_l = w.tolist()
        q_l = (G @ w).tolist()
    else:
        q = G @ w

    trace = []
    converged = False
    sweeps = 0
    for sweep in range(cfg.max_sweeps):
        sweeps = sweep + 1
        if use_python:
            delta_max = _sweep_python(G_l, c_l, w_l, q_l, thr, order)
            w_view = w_l
            quad = sum(w_l[j] * q_l[j] for j in range(d))
            lin = sum(c_l[j] * w_l[j] for j in range(d))
            l1 = sum(abs(v) for v in w_l)
        else:
            if sweep and sweep % _REFRESH_SWEEPS == 0:
                q = G @ w
            delta_max = _sweep_numpy(G, c, w, q, thr, order)
            w_view = w
            quad = float(w @ q)
            lin = float(c @ w)
            l1 = float(np.sum(np.abs(w)))
        trace.append((quad - 2.0 * lin + rtr) / n + cfg.lam * l1)
        if delta_max <= cfg.tol:
            converged = True
            break

    w_out = np.array(w_l) if use_python else w
    return LassoFit(w=w_out, sweeps=sweeps, converged=converged,
                    objective_trace=np.array(trace))


def lasso_objective(X: np.ndarray, r: np.ndarray, w: np.ndarray, lam: float) -> float:
    """(1/n)||X w - r||^2 + lam ||w||_1, evaluated from the definition."""
    resid = X @ w - r
    return float(resid @ resid) / X.shape[0] + lam * float(np.sum(np.abs(w)))


def subgradient_residuals(X: np.ndarray, r: np.ndarray, w: np.ndarray,
                          lam: float) -> tuple[float, float]:
    """Optimality residuals of a candidate solution.

    Returns ``(on_support, off_support)`` where on_support is
    ``max |(2/n) X_j^T (X w - r) + lam sign(w_j)|`` over nonzero w_j and
    off_support is ``max |(2/n) X_j^T (X w - r)|`` over zero w_j (which
    must be <= lam at an optimum).
    """
    n = X.shape[0]
    grad = (2.0 / n) * (X.T @ (X @ w - r))
    nz = w != 0
    on = float(np.max(np.abs(grad[nz] + lam * np.sign(w[nz])))) if np.any(nz) else 0.0
    off = float(np.max(np.abs(grad[~nz]))) if np.any(~nz) else 0.0
    return on, off

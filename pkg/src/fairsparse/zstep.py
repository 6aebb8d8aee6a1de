"""Latent-attribute block: the lifted matrix M(w), the elliptope
minimization that updates Z, an independent SDP oracle, and the exact
brute-force solver of the combinatorial problem.

For residual r = X w - y the lifted objective is
``<M(w), Z> = l(w) + (2 gamma / n) r^T z + gamma^2`` over rank-one sign
matrices Z = zeta zeta^T with zeta = (1, z). Because the objective is
linear in Z, touches Z only through its first row (the diagonal is
pinned to 1), and feasibility forces |Z[0, i]| <= 1, the elliptope
minimum is attained at z_i = -sign(r_i); the closed form below is the
production path and the projected-gradient oracle is the verifier.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ConvergenceError, DimensionError
from .fairlasso import SolverConfig, solve_weighted_lasso
from .numkit import sym_eig

MIQP_DEFAULT_LIMIT = 14
Z_DIAG_TOL = 1e-10
Z_PSD_TOL = 1e-8


def assemble_M(X: np.ndarray, y: np.ndarray, w: np.ndarray,
               gamma: float) -> np.ndarray:
    """The (n+1) x (n+1) lifted matrix
    ``[[l(w), (gamma/n) r^T], [(gamma/n) r, (gamma^2/n) I]]``
    with r = X w - y and l(w) = (1/n) ||r||^2.
    """
    if gamma <= 0:
        raise ConfigError("gamma must be > 0")
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    n = X.shape[0]
    r = X @ w - y
    M = np.zeros((n + 1, n + 1))
    M[0, 0] = float(r @ r) / n
    M[0, 1:] = (gamma / n) * r
    M[1:, 0] = (gamma / n) * r
    M[1:, 1:] = (gamma**2 / n) * np.eye(n)
    return M


def rank_one_sign_z(z: np.ndarray) -> np.ndarray:
    """Z = zeta zeta^T for zeta = (1, z)."""
    zeta = np.concatenate(([1.0], np.asarray(z, dtype=np.float64)))
    return np.outer(zeta, zeta)


def sdp_objective(M: np.ndarray, Z: np.ndarray) -> float:
    """trace(M^T Z)."""
    M = np.asarray(M, dtype=np.float64)
    Z = np.asarray(Z, dtype=np.float64)
    if M.shape != Z.shape:
        raise DimensionError(f"shape mismatch {M.shape} vs {Z.shape}")
    return float(np.vdot(M, Z))


def z_feasibility(Z: np.ndarray, *, diag_tol: float = Z_DIAG_TOL,
                  psd_tol: float = Z_PSD_TOL) -> tuple[bool, float, float]:
    """(feasible, max diag deviation, min eigenvalue) for the elliptope."""
    diag_err = float(np.max(np.abs(np.diag(Z) - 1.0)))
    eig_min = float(sym_eig(Z).values[0])
    return (diag_err <= diag_tol and eig_min >= -psd_tol), diag_err, eig_min


def _z_step_core(r: np.ndarray, gamma: float, n: int) -> tuple[np.ndarray, float]:
    """Optimal sign vector and objective for a given residual."""
    z = np.where(r > 0, -1, 1).astype(np.int64)  # zero residual -> +1
    objective = float(r @ r) / n + gamma**2 - (2.0 * gamma / n) * float(
        np.sum(np.abs(r))
    )
    return z, objective


def solve_z_step(X: np.ndarray, y: np.ndarray, w: np.ndarray,
                 gamma: float) -> tuple[np.ndarray, np.ndarray, float]:
    """Closed-form elliptope minimizer of <M(w), Z> at fixed w.

    Returns ``(z, Z, objective)`` with z_i = -sign(r_i) (ties to +1),
    Z the rank-one sign matrix, and
    ``objective = l(w) + gamma^2 - (2 gamma / n) sum |r_i|``.
    """
    if gamma <= 0:
        raise ConfigError("gamma must be > 0")
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    r = X @ np.asarray(w, dtype=np.float64) - y
    z, objective = _z_step_core(r, gamma, X.shape[0])
    return z, rank_one_sign_z(z), objective


@dataclass(frozen=True)
class OracleConfig:
    """Settings for the elliptope SDP oracle."""

    rho_scale: float = 0.3      # penalty = rho_scale * ||M||_2
    relax: float = 1.7          # over-relaxation factor
    tol: float = 1e-7           # per-iteration objective change threshold
    patience: int = 30          # consecutive small changes required
    primal_gate: float = 1e-7   # feasibility gap required before stopping
    max_iters: int = 60000
    adapt_window: int = 20      # penalty rebalancing cadence


def _finalize_feasible(Z: np.ndarray) -> np.ndarray:
    """PSD-clip then renormalize to an exact unit diagonal (congruence
    by a positive diagonal keeps the matrix PSD)."""
    vals, vecs = np.linalg.eigh(0.5 * (Z + Z.T))
    Zc = (vecs * np.maximum(vals, 0.0)) @ vecs.T
    dvec = np.sqrt(np.maximum(np.diag(Zc), 1e-15))
    Zc = Zc / np.outer(dvec, dvec)
    np.fill_diagonal(Zc, 1.0)
    return 0.5 * (Zc + Zc.T)


def elliptope_sdp_oracle(M: np.ndarray, cfg: OracleConfig = OracleConfig()) -> np.ndarray:
    """Minimize <M, Z> over {diag(Z) = 1, Z PSD}.

    Independent verifier for the closed-form z update, for moderate
    sizes (verification scale, n up to ~200). Each iteration takes a
    gradient step along -M with the diagonal pinned to 1, projects onto
    the PSD cone by eigenvalue clipping, and carries a running dual
    correction (over-relaxed ADMM splitting of the two constraint sets),
    which makes the alternation converge to the constrained optimum
    instead of cycling. Stops once the objective change stays below
    ``cfg.tol`` with the splitting gap closed; raises
    :class:`ConvergenceError` if that never happens. The returned
    iterate is re-projected so it is feasible within the ZMatrix
    tolerances.
    """
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError(f"need a square matrix, got {M.shape}")
    if M.shape[0] > 201:
        raise DimensionError("oracle is for verification scale (n <= 200)")

    Ms = 0.5 * (M + M.T)
    spectral = float(np.max(np.abs(np.linalg.eigvalsh(Ms))))
    if spectral == 0.0:
        return np.eye(M.shape[0])

    rho = cfg.rho_scale * spectral
    W = np.eye(M.shape[0])
    U = np.zeros_like(Ms)
    prev_obj = sdp_objective(Ms, W)
    calm = 0
    settled = False
    for it in range(cfg.max_iters):
        Z = W - U - Ms / rho
        np.fill_diagonal(Z, 1.0)
        Zr = cfg.relax * Z + (1.0 - cfg.relax) * W
        vals, vecs = np.linalg.eigh(Zr + U)
        W_new = (vecs * np.maximum(vals, 0.0)) @ vecs.T
        dual_res = rho * float(np.linalg.norm(W_new - W))
        W = W_new
        U += Zr - W
        primal_res = float(np.linalg.norm(Z - W))

        obj = sdp_objective(Ms, W)
        small = abs(prev_obj - obj) <= cfg.tol * max(1.0, abs(obj))
        calm = calm + 1 if small and primal_res <= cfg.primal_gate else 0
        prev_obj = obj
        if calm >= cfg.patience:
            settled = True
            break
        if it % cfg.adapt_window == cfg.adapt_window - 1:
            if primal_res > 10.0 * dual_res:
                rho *= 1.5
                U /= 1.5
            elif dual_res > 10.0 * primal_res:
                rho /= 1.5
                U *= 1.5
    if not settled:
        raise ConvergenceError(
            f"elliptope oracle did not settle; last objective {prev_obj:.9g}",
            last_objective=prev_obj,
        )
    return _finalize_feasible(W)


@dataclass(frozen=True)
class MiqpResult:
    """Global optimum of the combinatorial problem over all sign vectors."""

    w_opt: np.ndarray
    z_opt: np.ndarray
    objective: float
    enumerated: int


def combinatorial_objective(X: np.ndarray, y: np.ndarray, w: np.ndarray,
                            z: np.ndarray, gamma: float, lam: float) -> float:
    """(1/n)||X w + gamma z - y||^2 + lam ||w||_1."""
    resid = X @ w + gamma * np.asarray(z, dtype=np.float64) - y
    return float(resid @ resid) / X.shape[0] + lam * float(np.sum(np.abs(w)))


def miqp_brute_force(X: np.ndarray, y: np.ndarray, gamma: float, lam: float,
                     limit: int = MIQP_DEFAULT_LIMIT,
                     solver: SolverConfig | None = None) -> MiqpResult:
    """Exact minimum of the combinatorial problem by enumerating all
    2^n sign vectors, solving the inner weighted lasso for each.

    Enumeration is lexicographic with -1 < +1 and only strict
    improvements are kept, so ties resolve to the lexicographically
    smallest z. Refuses n > limit (exponential blow-up guard).
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n, d = X.shape
    if n > limit:
        raise ConfigError(f"n={n} exceeds the enumeration limit {limit}")
    cfg = solver if solver is not None else SolverConfig(lam=lam, tol=1e-10)
    if cfg.lam != lam:
        cfg = SolverConfig(lam=lam, tol=cfg.tol, max_sweeps=cfg.max_sweeps,
                           rho=cfg.rho, alpha=cfg.alpha, k=cfg.k)
    G = X.T @ X

    best = None
    count = 0
    w_warm = np.zeros(d)
    for signs in itertools.product((-1, 1), repeat=n):
        count += 1
        z = np.array(signs, dtype=np.int64)
        fit = solve_weighted_lasso(X, y - gamma * z.astype(np.float64), cfg,
                                   w0=w_warm, gram=G)
        w_warm = fit.w
        obj = combinatorial_objective(X, y, fit.w, z, gamma, lam)
        if best is None or obj < best[0]:
            best = (obj, fit.w.copy(), z)
    obj, w_opt, z_opt = best
    return MiqpResult(w_opt=w_opt, z_opt=z_opt, objective=obj, enumerated=count)

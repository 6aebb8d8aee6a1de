"""Numerical verification of the theory on concrete instances.

Covers: finite-sample assumption quantities (eigenvalue floor and mutual
incoherence), the primal-dual witness construction and its exact
identities, full KKT checking of fitted solutions, the spectral/inertia
structure of the dual matrix, and invexity/non-convexity probes for the
lifted objective.

Probabilistic statements are always verified as empirical frequencies
over seeded trials, never asserted as certainties.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, SingularMatrixError
from .fairlasso import SolverConfig, solve_weighted_lasso
from .numkit import SplitMix64, cholesky_solve, substream_seed, sym_eig
from .synthgen import Dataset
from .zstep import assemble_M, rank_one_sign_z, sdp_objective

INERTIA_ZERO_BAND_RTOL = 1e-8  # zero band relative to ||Lambda||_2


@dataclass(frozen=True)
class AssumptionReport:
    c_min_hat: float           # smallest eigenvalue of (1/n) X_S^T X_S
    incoherence_norm: float    # || H_{S^c S} H_{SS}^{-1} ||_inf
    a1_pass: bool
    a2_pass: bool
    alpha_margin: float        # 1 - incoherence_norm

    def to_json_dict(self) -> dict:
        return {
            "c_min_hat": self.c_min_hat,
            "incoherence_norm": self.incoherence_norm,
            "a1_pass": self.a1_pass,
            "a2_pass": self.a2_pass,
            "alpha_margin": self.alpha_margin,
        }


def check_assumptions(X: np.ndarray, S, *, pd_rtol: float = 1e-10) -> AssumptionReport:
    """Sample eigenvalue floor and mutual-incoherence norm for a support.

    The incoherence matrix is obtained by solving H_SS against H_{S S^c}
    and taking the induced infinity norm (max absolute row sum). A
    numerically singular H_SS yields ``a1_pass=False`` and an infinite
    incoherence sentinel. An empty complement gives incoherence 0.
    """
    X = np.asarray(X, dtype=np.float64)
    n, d = X.shape
    S = np.asarray(sorted(set(int(i) for i in S)), dtype=np.int64)
    if S.size == 0:
        raise ConfigError("support must be non-empty")
    if S[0] < 0 or S[-1] >= d:
        raise ConfigError("support indices out of range")

    H = (X.T @ X) / n
    Hss = H[np.ix_(S, S)]
    c_min_hat = float(sym_eig(Hss).values[0])
    floor = pd_rtol * float(np.trace(Hss)) / S.size

    Sc = np.setdiff1d(np.arange(d), S)
    if Sc.size == 0:
        incoherence = 0.0
    else:
        try:
            # W = H_SS^{-1} H_{S S^c}; rows of H_{S^c S} H_SS^{-1} are W's columns
            W = cholesky_solve(Hss, H[np.ix_(S, Sc)], pd_rtol=pd_rtol)
            incoherence = float(np.max(np.sum(np.abs(W), axis=0)))
        except SingularMatrixError:
            incoherence = math.inf

    return AssumptionReport(
        c_min_hat=c_min_hat,
        incoherence_norm=incoherence,
        a1_pass=c_min_hat > floor and math.isfinite(incoherence),
        a2_pass=incoherence < 1.0,
        alpha_margin=1.0 - incoherence,
    )


@dataclass(frozen=True)
class WitnessReport:
    w_tilde: np.ndarray            # restricted solution, zero-padded to d
    mu: np.ndarray                 # dual vector, length n+1
    Lambda: np.ndarray             # dual matrix, (n+1) x (n+1)
    g: np.ndarray                  # recovered subgradient, length d
    stationarity_residual: float
    g_offsupport_max: float
    lambda_null_residual: float    # || Lambda zeta ||_2
    lambda_eig2: float             # second-smallest eigenvalue of Lambda
    complementary_slackness: float  # <Lambda, Z>
    delta_norm: float              # || w_tilde_S - w*_S ||_2 (nan without w*)
    delta_bound: float             # 2 lam sqrt(s) / c_min

    def to_json_dict(self) -> dict:
        return {
            "stationarity_residual": self.stationarity_residual,
            "g_offsupport_max": self.g_offsupport_max,
            "lambda_null_residual": self.lambda_null_residual,
            "lambda_eig2": self.lambda_eig2,
            "complementary_slackness": self.complementary_slackness,
            "delta_norm": None if math.isnan(self.delta_norm) else self.delta_norm,
            "delta_bound": self.delta_bound,
        }


def _dual_pair(X, y, w, z, gamma):
    """mu = -diag(M Z) and Lambda = M + diag(mu) for Z = zeta zeta^T.

    diag(M zeta zeta^T)_i = (M zeta)_i zeta_i, so no (n+1)^3 product is
    needed.
    """
    M = assemble_M(X, y, w, gamma)
    zeta = np.concatenate(([1.0], np.asarray(z, dtype=np.float64)))
    mu = -(M @ zeta) * zeta
    Lam = M + np.diag(mu)
    return M, zeta, mu, Lam


def build_witness(dataset: Dataset, truth_z: np.ndarray, S, gamma: float,
                  lam: float, w_star: np.ndarray | None = None,
                  c_min: float | None = None,
                  solver: SolverConfig | None = None) -> WitnessReport:
    """Primal-dual witness for a known attribute vector and support.

    Solves the support-restricted weighted lasso on the debiased target,
    zero-pads, and forms the dual pair (mu, Lambda). The subgradient is
    recovered from stationarity, g = -(2/(n lam)) X^T (X w + gamma z - y),
    which requires lam > 0.
    """
    if lam <= 0:
        raise ConfigError("witness subgradient recovery requires lam > 0")
    X, y = dataset.X, dataset.y
    n, d = X.shape
    S = np.asarray(sorted(set(int(i) for i in S)), dtype=np.int64)
    z = np.asarray(truth_z, dtype=np.int64)

    cfg = solver if solver is not None else SolverConfig(lam=lam, tol=1e-10)
    target = y - gamma * z.astype(np.float64)
    restricted = solve_weighted_lasso(X[:, S], target, cfg)
    w_tilde = np.zeros(d)
    w_tilde[S] = restricted.w

    M, zeta, mu, Lam = _dual_pair(X, y, w_tilde, z, gamma)

    resid = X @ w_tilde + gamma * z.astype(np.float64) - y
    grad = (2.0 / n) * (X.T @ resid)
    g = -grad / lam
    nz = w_tilde != 0
    stationarity_residual = (
        float(np.max(np.abs(grad[nz] + lam * np.sign(w_tilde[nz]))))
        if np.any(nz) else 0.0
    )
    Sc = np.setdiff1d(np.arange(d), S)
    g_offsupport_max = float(np.max(np.abs(g[Sc]))) if Sc.size else 0.0

    if w_star is not None:
        delta_norm = float(np.linalg.norm(w_tilde[S] - np.asarray(w_star)[S]))
    else:
        delta_norm = math.nan
    if c_min is None:
        c_min = float(sym_eig((X[:, S].T @ X[:, S]) / n).values[0])

    return WitnessReport(
        w_tilde=w_tilde,
        mu=mu,
        Lambda=Lam,
        g=g,
        stationarity_residual=stationarity_residual,
        g_offsupport_max=g_offsupport_max,
        lambda_null_residual=float(np.linalg.norm(Lam @ zeta)),
        lambda_eig2=float(sym_eig(Lam).values[1]),
        complementary_slackness=float(zeta @ (Lam @ zeta)),
        delta_norm=delta_norm,
        delta_bound=2.0 * lam * math.sqrt(S.size) / c_min,
    )


@dataclass(frozen=True)
class KktReport:
    stationarity_w_ok: bool
    stationarity_w_residual: float
    subgradient_max: float         # ||g||_inf over zero coordinates
    stationarity_z_ok: bool
    stationarity_z_residual: float
    complementary_ok: bool
    complementary_value: float
    dual_ok: bool
    lambda_eig_min: float
    primal_ok: bool
    z_diag_error: float
    z_eig_min: float

    @property
    def all_ok(self) -> bool:
        return (self.stationarity_w_ok and self.stationarity_z_ok
                and self.complementary_ok and self.dual_ok and self.primal_ok)

    def to_json_dict(self) -> dict:
        return {
            "stationarity_w_ok": self.stationarity_w_ok,
            "stationarity_w_residual": self.stationarity_w_residual,
            "subgradient_max": self.subgradient_max,
            "stationarity_z_ok": self.stationarity_z_ok,
            "stationarity_z_residual": self.stationarity_z_residual,
            "complementary_ok": self.complementary_ok,
            "complementary_value": self.complementary_value,
            "dual_ok": self.dual_ok,
            "lambda_eig_min": self.lambda_eig_min,
            "primal_ok": self.primal_ok,
            "z_diag_error": self.z_diag_error,
            "z_eig_min": self.z_eig_min,
            "all_ok": self.all_ok,
        }


def check_kkt(dataset: Dataset, solution, gamma: float, lam: float,
              tol: float = 1e-6) -> KktReport:
    """Verify all five optimality conditions of a candidate solution.

    (a) stationarity in w with a valid l1 subgradient, (b) stationarity
    in Z via the constructed dual pair, (c) complementary slackness
    <Lambda, Z> <= tol, (d) dual feasibility eig_min(Lambda) >= -tol,
    (e) primal feasibility of Z. A failing condition is reported, not
    raised.
    """
    X, y = dataset.X, dataset.y
    n = X.shape[0]
    w = solution.w
    z = np.asarray(solution.z, dtype=np.int64)

    resid = X @ w + gamma * z.astype(np.float64) - y
    grad = (2.0 / n) * (X.T @ resid)
    nz = w != 0
    stat_res = float(np.max(np.abs(grad[nz] + lam * np.sign(w[nz])))) if np.any(nz) else 0.0
    if lam > 0:
        sub_max = float(np.max(np.abs(grad[~nz] / lam))) if np.any(~nz) else 0.0
        stat_ok = stat_res <= tol and sub_max <= 1.0 + tol
    else:
        sub_max = 0.0
        stat_res = float(np.max(np.abs(grad)))
        stat_ok = stat_res <= tol

    M, zeta, mu, Lam = _dual_pair(X, y, w, z, gamma)
    stat_z_res = float(np.max(np.abs(M + np.diag(mu) - Lam)))

    comp = sdp_objective(Lam, solution.Z)
    lam_eig_min = float(np.linalg.eigvalsh(Lam)[0])
    z_diag_err = float(np.max(np.abs(np.diag(solution.Z) - 1.0)))
    z_eig_min = float(np.linalg.eigvalsh(solution.Z)[0])

    return KktReport(
        stationarity_w_ok=stat_ok,
        stationarity_w_residual=stat_res,
        subgradient_max=sub_max,
        stationarity_z_ok=stat_z_res == 0.0,
        stationarity_z_residual=stat_z_res,
        complementary_ok=abs(comp) <= tol,
        complementary_value=comp,
        dual_ok=lam_eig_min >= -tol,
        lambda_eig_min=lam_eig_min,
        primal_ok=z_diag_err <= tol and z_eig_min >= -tol,
        z_diag_error=z_diag_err,
        z_eig_min=z_eig_min,
    )


@dataclass(frozen=True)
class SpectrumReport:
    eig2: float
    inertia: tuple[int, int, int]      # (positive, negative, zero) counts
    diag_check: bool                   # inertia additivity verified

    def to_json_dict(self) -> dict:
        return {"eig2": self.eig2, "inertia": list(self.inertia),
                "diag_check": self.diag_check}


def lambda_spectrum(witness: WitnessReport, *,
                    zero_band_rtol: float = INERTIA_ZERO_BAND_RTOL) -> SpectrumReport:
    """Spectral summary of the dual matrix.

    The inertia of Lambda must match the sign pattern of its trailing
    diagonal block (the entries -(gamma/n) r_i z_i) with one extra zero
    eigenvalue contributed by the null vector zeta: inertia additivity
    across the Schur complement. Zero counting uses the band
    ``|x| <= zero_band_rtol * ||Lambda||_2`` because the entries scale
    like gamma^2 / n.
    """
    eig = sym_eig(witness.Lambda)
    spectral = float(np.max(np.abs(eig.values))) if eig.values.size else 0.0
    band = zero_band_rtol * spectral

    def classify(v):
        pos = int(np.sum(v > band))
        neg = int(np.sum(v < -band))
        return pos, neg, v.size - pos - neg

    inertia = classify(eig.values)
    diag_tail = np.diag(witness.Lambda)[1:]
    dpos, dneg, dzero = classify(diag_tail)
    expected = (dpos, dneg, dzero + 1)
    return SpectrumReport(
        eig2=float(eig.values[1]),
        inertia=inertia,
        diag_check=inertia == expected,
    )


@dataclass(frozen=True)
class InvexityReport:
    trials: int
    violations: int
    min_gap: float                 # most negative invexity gap observed
    counterexample_gap: float      # first-order convexity gap, must be < 0

    @property
    def ok(self) -> bool:
        return self.violations == 0 and self.counterexample_gap < 0

    def to_json_dict(self) -> dict:
        return {"trials": self.trials, "violations": self.violations,
                "min_gap": self.min_gap,
                "counterexample_gap": self.counterexample_gap,
                "ok": self.ok}


def _lifted_value(X, y, w, Z, gamma):
    """<M'(w), Z> with M' = M + I, for a feasible Z with unit diagonal."""
    M = assemble_M(X, y, w, gamma)
    return sdp_objective(M + np.eye(M.shape[0]), Z)


def _lifted_w_gradient(X, y, w_bar, z_bar, gamma):
    """d<M'(w), Z_bar>/dw at w_bar for Z_bar with unit diagonal and first
    row tail z_bar: (2/n) X^T (X w_bar - y + gamma z_bar)."""
    n = X.shape[0]
    return (2.0 / n) * (X.T @ (X @ w_bar - y + gamma * z_bar))


def invexity_probe(dataset: Dataset, gamma: float, trials: int,
                   seed: int, *, tol: float = 1e-8) -> InvexityReport:
    """Randomized check of the invexity inequality plus an explicit
    first-order convexity violation.

    For random pairs (w, Z), (w_bar, Z_bar) of points with rank-one sign
    Z blocks, evaluates
    ``f(w, Z) - f(w_bar, Z_bar) - <grad f(w_bar, Z_bar), eta>`` with the
    kernel ``eta = (w - w_bar, M'(w_bar)^{-1} M'(w) (Z - Z_bar))`` and
    counts violations below -tol. Separately constructs a pair where the
    plain first-order convexity inequality fails, demonstrating that the
    lifted objective is non-convex even though it is invex.
    """
    if trials < 1:
        raise ConfigError("trials must be >= 1")
    X, y = dataset.X, dataset.y
    n, d = X.shape
    stream = SplitMix64(substream_seed(seed, 7))
    eye = np.eye(n + 1)

    violations = 0
    min_gap = math.inf
    done = 0
    while done < trials:
        w = stream.normals(d)
        w_bar = stream.normals(d)
        z = np.where(stream.uniforms(n) > 0.5, 1.0, -1.0)
        z_bar = np.where(stream.uniforms(n) > 0.5, 1.0, -1.0)
        Z = rank_one_sign_z(z)
        Z_bar = rank_one_sign_z(z_bar)

        M_bar = assemble_M(X, y, w_bar, gamma) + eye
        M_cur = assemble_M(X, y, w, gamma) + eye
        try:
            eta_Z = np.linalg.solve(M_bar, M_cur @ (Z - Z_bar))
        except np.linalg.LinAlgError:
            continue  # resample the pair (M' singular is measure-zero)

        gap = (
            _lifted_value(X, y, w, Z, gamma)
            - _lifted_value(X, y, w_bar, Z_bar, gamma)
            - float(_lifted_w_gradient(X, y, w_bar, z_bar, gamma) @ (w - w_bar))
            - sdp_objective(M_bar, eta_Z)
        )
        min_gap = min(min_gap, gap)
        if gap < -tol:
            violations += 1
        done += 1

    counter_gap = _convexity_counterexample_gap(X, y, gamma)
    return InvexityReport(trials=done, violations=violations,
                          min_gap=min_gap, counterexample_gap=counter_gap)


def _convexity_counterexample_gap(X, y, gamma):
    """First-order convexity gap for a constructed pair; negative value
    certifies non-convexity of the lifted objective.

    Take w = beta e_i, w_bar = -beta e_i, Z = I, and Z_bar = I plus the
    symmetric unit entries (0, k+1). The gap evaluates to
    (4 beta / n)(beta sum_l X_li^2 - gamma X_ki), so
    beta = gamma X_ki / (2 sum_l X_li^2) makes it strictly negative
    whenever X_ki != 0.
    """
    n, d = X.shape
    k = i = None
    for col in range(d):
        rows = np.flatnonzero(X[:, col])
        if rows.size:
            i, k = col, int(rows[0])
            break
    if i is None:
        raise ConfigError("counterexample needs a nonzero design entry")

    col_sq = float(X[:, i] @ X[:, i])
    beta = gamma * X[k, i] / (2.0 * col_sq)
    w = np.zeros(d)
    w[i] = beta
    w_bar = -w

    Z = np.eye(n + 1)
    Z_bar = np.eye(n + 1)
    Z_bar[0, k + 1] = Z_bar[k + 1, 0] = 1.0
    z_bar_tail = Z_bar[1:, 0]

    M_bar = assemble_M(X, y, w_bar, gamma) + np.eye(n + 1)
    return (
        _lifted_value(X, y, w, Z, gamma)
        - _lifted_value(X, y, w_bar, Z_bar, gamma)
        - float(_lifted_w_gradient(X, y, w_bar, z_bar_tail, gamma) @ (w - w_bar))
        - sdp_objective(M_bar, Z - Z_bar)
    )

import itertools

import numpy as np
import pytest

from fairsparse.errors import ConfigError, DimensionError
from fairsparse.numkit import SplitMix64, cholesky_solve, substream_seed
from fairsparse.zstep import (MIQP_DEFAULT_LIMIT, OracleConfig, assemble_M,
                              combinatorial_objective, elliptope_sdp_oracle,
                              miqp_brute_force, rank_one_sign_z,
                              sdp_objective, solve_z_step, z_feasibility)

STRICT = OracleConfig(tol=1e-12, patience=50)


def random_instance(seed, n, d):
    rng = SplitMix64(substream_seed(seed, 1))
    X = rng.normals(n * d).reshape(n, d)
    y = rng.normals(n)
    w = rng.normals(d)
    gamma = 0.5 + 2.5 * rng.uniforms(1)[0]
    return X, y, w, gamma


class TestAssembleM:
    def test_zero_residual_gives_diagonal(self):
        X = np.eye(3)
        w = np.array([1.0, 2.0, 3.0])
        M = assemble_M(X, X @ w, w, gamma=2.0)
        assert np.allclose(M, np.diag([0.0] + [4.0 / 3] * 3))

    def test_hand_evaluated_1x1(self):
        M = assemble_M(np.array([[1.0]]), np.array([0.0]), np.array([2.0]), 1.0)
        assert np.array_equal(M, np.array([[4.0, 2.0], [2.0, 1.0]]))

    def test_gamma_homogeneity(self):
        X, y, w, _ = random_instance(5, 6, 2)
        M1 = assemble_M(X, y, w, 1.5)
        M2 = assemble_M(X, y, w, 3.0)
        assert np.allclose(M2[0, 1:], 2.0 * M1[0, 1:])
        assert np.allclose(M2[1:, 1:], 4.0 * M1[1:, 1:])

    def test_top_left_is_mean_squared_residual(self):
        X, y, w, gamma = random_instance(6, 9, 3)
        M = assemble_M(X, y, w, gamma)
        r = X @ w - y
        assert M[0, 0] == pytest.approx(float(r @ r) / 9, rel=1e-12)
        assert np.max(np.abs(M - M.T)) == 0.0

    def test_gamma_must_be_positive(self):
        with pytest.raises(ConfigError):
            assemble_M(np.eye(2), np.zeros(2), np.zeros(2), 0.0)


class TestSolveZStep:
    def test_sign_rule(self):
        X = np.eye(3)
        w = np.array([1.0, -2.0, 3.0])  # residual r = w with y = 0
        z, Z, _ = solve_z_step(X, np.zeros(3), w, 1.0)
        assert z.tolist() == [-1, 1, -1]

    def test_zero_residual_tie_break(self):
        X = np.eye(2)
        w = np.array([1.0, 1.0])
        z, Z, obj = solve_z_step(X, X @ w, w, 2.0)
        assert z.tolist() == [1, 1]
        assert obj == pytest.approx(4.0)  # l(w)=0, gamma^2=4, sum|r|=0

    def test_objective_matches_inner_product(self):
        X, y, w, gamma = random_instance(7, 8, 3)
        z, Z, obj = solve_z_step(X, y, w, gamma)
        M = assemble_M(X, y, w, gamma)
        assert obj == pytest.approx(sdp_objective(M, Z), rel=1e-12)

    def test_z_matrix_invariants(self):
        X, y, w, gamma = random_instance(8, 10, 2)
        _, Z, _ = solve_z_step(X, y, w, gamma)
        feasible, diag_err, eig_min = z_feasibility(Z)
        assert feasible
        assert diag_err == 0.0
        assert np.linalg.matrix_rank(Z) == 1

    @pytest.mark.parametrize("trial", range(5))
    def test_matches_sdp_oracle_at_n6(self, trial):
        X, y, w, gamma = random_instance(40 + trial, 6, 2)
        _, _, obj = solve_z_step(X, y, w, gamma)
        M = assemble_M(X, y, w, gamma)
        oracle_obj = sdp_objective(M, elliptope_sdp_oracle(M, STRICT))
        assert abs(obj - oracle_obj) <= 1e-5


class TestSdpObjective:
    def test_identity_z_gives_trace(self):
        X, y, w, gamma = random_instance(9, 5, 2)
        M = assemble_M(X, y, w, gamma)
        assert sdp_objective(M, np.eye(6)) == pytest.approx(np.trace(M))

    def test_identity_m_gives_n_plus_one(self):
        z, Z, _ = solve_z_step(np.eye(4), np.ones(4), np.zeros(4), 1.0)
        assert sdp_objective(np.eye(5), Z) == pytest.approx(5.0)

    def test_rank_one_is_quadratic_form(self):
        X, y, w, gamma = random_instance(10, 7, 3)
        M = assemble_M(X, y, w, gamma)
        z = np.where(SplitMix64(3).uniforms(7) > 0.5, 1, -1)
        zeta = np.concatenate(([1.0], z.astype(float)))
        assert sdp_objective(M, rank_one_sign_z(z)) == pytest.approx(
            float(zeta @ M @ zeta), rel=1e-12
        )

    def test_shape_mismatch(self):
        with pytest.raises(DimensionError):
            sdp_objective(np.eye(3), np.eye(4))


class TestElliptopeOracle:
    def test_identity_m_constant_objective(self):
        Z = elliptope_sdp_oracle(np.eye(7))
        assert sdp_objective(np.eye(7), Z) == pytest.approx(7.0, abs=1e-6)

    def test_negative_first_row_closed_form(self):
        # M with first row/col strictly negative off the diagonal, zero
        # elsewhere: minimum is 2 * sum(m) at Z[0, i] = +1
        m = np.array([-0.7, -1.3, -0.4, -2.0])
        M = np.zeros((5, 5))
        M[0, 1:] = m
        M[1:, 0] = m
        Z = elliptope_sdp_oracle(M, STRICT)
        assert sdp_objective(M, Z) == pytest.approx(2 * m.sum(), abs=1e-5)

    @pytest.mark.parametrize("trial", range(4))
    def test_below_exhaustive_rank_one_enumeration(self, trial):
        rng = SplitMix64(substream_seed(60, trial))
        A = rng.normals(36).reshape(6, 6)
        M = 0.5 * (A + A.T)
        oracle_obj = sdp_objective(M, elliptope_sdp_oracle(M, STRICT))
        best = min(sdp_objective(M, rank_one_sign_z(np.array(signs)))
                   for signs in itertools.product((-1, 1), repeat=5))
        assert oracle_obj <= best + 1e-6

    def test_feasibility_of_output(self):
        X, y, w, gamma = random_instance(11, 12, 3)
        Z = elliptope_sdp_oracle(assemble_M(X, y, w, gamma))
        feasible, diag_err, eig_min = z_feasibility(Z)
        assert feasible

    def test_scale_guard(self):
        with pytest.raises(DimensionError):
            elliptope_sdp_oracle(np.eye(300))


class TestMiqpBruteForce:
    def test_enumeration_count_n1(self):
        res = miqp_brute_force(np.array([[1.0]]), np.array([0.5]),
                               gamma=1.0, lam=0.0)
        assert res.enumerated == 2

    def test_gamma_dominant_noise_free_recovers_truth(self):
        rng = SplitMix64(21)
        X = rng.normals(4).reshape(4, 1)
        w_star = np.array([1.0])
        z_star = np.array([1, 1, -1, -1])
        y = X @ w_star + 10.0 * z_star
        res = miqp_brute_force(X, y, gamma=10.0, lam=0.0)
        assert res.z_opt.tolist() == z_star.tolist()
        assert res.objective <= 1e-12
        assert combinatorial_objective(X, y, res.w_opt, res.z_opt, 10.0, 0.0) == \
            pytest.approx(res.objective, abs=1e-10)

    def test_matches_least_squares_oracle_at_lambda_zero(self):
        # with lam=0 and full column rank, the inner solve is least
        # squares; check the global optimum against the normal equations
        rng = SplitMix64(33)
        n, d = 6, 2
        X = rng.normals(n * d).reshape(n, d)
        y = rng.normals(n)
        gamma = 1.3
        res = miqp_brute_force(X, y, gamma=gamma, lam=0.0)
        G = X.T @ X
        best = np.inf
        for signs in itertools.product((-1, 1), repeat=n):
            z = np.array(signs, dtype=float)
            w_ls = cholesky_solve(G, X.T @ (y - gamma * z))
            resid = X @ w_ls + gamma * z - y
            best = min(best, float(resid @ resid) / n)
        assert res.objective == pytest.approx(best, abs=1e-9)

    def test_row_permutation_invariance(self):
        rng = SplitMix64(44)
        n, d = 5, 2
        X = rng.normals(n * d).reshape(n, d)
        y = rng.normals(n)
        perm = rng.uniforms(n).argsort()
        a = miqp_brute_force(X, y, gamma=0.9, lam=0.05)
        b = miqp_brute_force(X[perm], y[perm], gamma=0.9, lam=0.05)
        assert a.objective == pytest.approx(b.objective, rel=1e-9)
        assert a.z_opt[perm].tolist() == b.z_opt.tolist()

    def test_refuses_large_n(self):
        with pytest.raises(ConfigError):
            miqp_brute_force(np.ones((MIQP_DEFAULT_LIMIT + 1, 1)),
                             np.ones(MIQP_DEFAULT_LIMIT + 1), 1.0, 0.0)

    def test_tie_break_lexicographic(self):
        # X = 0 and y = 0 make every z optimal; the lexicographically
        # smallest sign vector (-1, ..., -1) must win
        res = miqp_brute_force(np.zeros((3, 1)), np.zeros(3), gamma=1e-9,
                               lam=1.0)
        assert res.z_opt.tolist() == [-1, -1, -1]

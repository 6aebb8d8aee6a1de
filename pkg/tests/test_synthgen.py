import numpy as np
import pytest

from fairsparse.errors import ConfigError
from fairsparse.synthgen import (Dataset, GenerativeConfig, GroundTruth,
                                 generate_dataset, half_split_signs,
                                 make_ground_truth, make_instance, response)


def cfg(**kw):
    base = dict(d=10, s=3, n=20, gamma=2.0, k=0.15, min_signal=0.75, seed=0)
    base.update(kw)
    return GenerativeConfig(**base)


class TestConfig:
    def test_s_greater_than_d_rejected(self):
        with pytest.raises(ConfigError):
            cfg(d=3, s=4)

    def test_n_below_two_rejected(self):
        with pytest.raises(ConfigError):
            cfg(n=1)

    def test_negative_gamma_rejected(self):
        with pytest.raises(ConfigError):
            cfg(gamma=-1.0)

    def test_noise_std_rule(self):
        c = cfg(n=100, k=0.3)
        assert np.isclose(c.noise_std, 0.3 / np.sqrt(np.log(100)))


class TestGroundTruth:
    def test_min_signal_floor(self):
        truth = make_ground_truth(cfg(d=5, s=5, min_signal=0.75))
        assert np.all(np.abs(truth.w_star) >= 0.75)
        assert np.all(np.abs(truth.w_star) <= 1.0)

    def test_full_support_when_s_equals_d(self):
        truth = make_ground_truth(cfg(d=6, s=6))
        assert truth.support == tuple(range(6))

    def test_half_split_z(self):
        truth = make_ground_truth(cfg(n=4))
        assert truth.z_star.tolist() == [1, 1, -1, -1]
        assert half_split_signs(5).tolist() == [1, 1, 1, -1, -1]

    def test_support_size_and_zero_pattern(self):
        truth = make_ground_truth(cfg(d=50, s=7, seed=3))
        assert len(truth.support) == 7
        nz = np.flatnonzero(truth.w_star)
        assert tuple(nz.tolist()) == truth.support

    def test_supports_vary_with_seed(self):
        supports = {make_ground_truth(cfg(d=40, s=5, seed=i)).support
                    for i in range(20)}
        assert len(supports) > 10

    def test_shuffle_flag_permutes_z(self):
        plain = make_ground_truth(cfg(n=50, seed=5))
        shuffled = make_ground_truth(cfg(n=50, seed=5, shuffle_z=True))
        assert sorted(plain.z_star) == sorted(shuffled.z_star)
        assert not np.array_equal(plain.z_star, shuffled.z_star)


class TestMechanism:
    def test_zero_noise_identity(self):
        truth, ds = make_instance(cfg(k=0.0, seed=11))
        recon = ds.X @ truth.w_star + truth.gamma * truth.z_star.astype(float)
        assert np.array_equal(ds.y, recon)

    def test_all_zero_mechanism(self):
        # gamma=0, no noise, w*=0 -> y is exactly zero
        X = np.ones((4, 2))
        y = response(X, np.zeros(2), half_split_signs(4), gamma=0.0)
        assert np.all(y == 0.0)

    def test_hand_evaluated_instance(self):
        # d=1, n=2, X=(1,1)^T, w*=(2), gamma=1, z*=(+1,-1), no noise
        y = response(np.ones((2, 1)), np.array([2.0]), np.array([1, -1]), 1.0)
        assert y.tolist() == [3.0, 1.0]

    def test_bit_identical_regeneration(self):
        t1, d1 = make_instance(cfg(seed=42))
        t2, d2 = make_instance(cfg(seed=42))
        assert np.array_equal(t1.w_star, t2.w_star)
        assert np.array_equal(t1.z_star, t2.z_star)
        assert np.array_equal(d1.X, d2.X)
        assert np.array_equal(d1.y, d2.y)

    def test_dimension_mismatch_rejected(self):
        truth = make_ground_truth(cfg(d=10, s=3, n=20))
        with pytest.raises(ConfigError):
            generate_dataset(truth, cfg(d=11, s=3, n=20))


class TestStatisticalProperties:
    def test_column_std_matches_spec(self):
        c = cfg(d=2, s=1, n=10000, k=0.0, column_std=(1.0, 2.5), seed=8)
        _, ds = make_instance(c)
        assert abs(ds.X[:, 0].std() - 1.0) <= 0.05
        assert abs(ds.X[:, 1].std() / 2.5 - 1.0) <= 0.05

    def test_group_mean_gap_is_two_gamma(self):
        # with w* = 0 the group means differ by 2 gamma
        n, gamma = 10000, 2.0
        c = cfg(d=3, s=1, n=n, gamma=gamma, k=0.15, seed=21)
        z = half_split_signs(n)
        truth = GroundTruth(w_star=np.zeros(3), z_star=z,
                            support=(0,), gamma=gamma)
        ds = generate_dataset(truth, c)
        gap = ds.y[z == 1].mean() - ds.y[z == -1].mean()
        assert abs(gap / (2 * gamma) - 1.0) <= 0.05

"""Synthetic ground truth and dataset generation.

The generative mechanism is ``y = X w* + gamma z* + e`` with an s-sparse
coefficient vector w*, a hidden per-sample attribute z* in {-1, +1}, and
independent Gaussian noise with standard deviation ``k / sqrt(log n)``
(natural log). All draws are routed through seeded SplitMix64 substreams
so regeneration with the same config is bit-identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DimensionError
from .numkit import SplitMix64, gaussian_sample, substream_seed

# substream tags (documented so streams are reproducible)
_TAG_SUPPORT = 1
_TAG_WSTAR = 2
_TAG_ZPERM = 3
_TAG_X = 4
_TAG_NOISE = 5


@dataclass(frozen=True)
class GenerativeConfig:
    """Parameters of the synthetic data mechanism."""

    d: int                      # ambient dimension
    s: int                      # number of nonzero coefficients
    n: int                      # sample count
    gamma: float = 2.0          # hidden-attribute bias magnitude
    k: float = 0.15             # noise scale; sigma_e = k / sqrt(log n)
    min_signal: float = 0.75    # floor on |w*_i| over the support
    seed: int = 0
    column_std: tuple[float, ...] | float = 1.0  # per-column std of X
    shuffle_z: bool = False     # permute the deterministic half-split z*

    def __post_init__(self):
        if not (1 <= self.s <= self.d):
            raise ConfigError(f"need 1 <= s <= d, got s={self.s}, d={self.d}")
        if self.n < 2:
            raise ConfigError(f"need n >= 2 (log n must be positive), got n={self.n}")
        # gamma == 0 is allowed: it degenerates to plain sparse regression
        if self.gamma < 0:
            raise ConfigError("gamma must be >= 0")
        if self.k < 0:
            raise ConfigError("k must be >= 0")
        if self.min_signal <= 0:
            raise ConfigError("min_signal must be > 0")

    @property
    def noise_std(self) -> float:
        return self.k / math.sqrt(math.log(self.n))


@dataclass(frozen=True)
class GroundTruth:
    """True parameters behind one synthetic instance."""

    w_star: np.ndarray          # length d, zero off support
    z_star: np.ndarray          # length n, entries in {-1, +1} (int)
    support: tuple[int, ...]    # sorted 0-based indices of nonzeros
    gamma: float


@dataclass(frozen=True)
class Dataset:
    """Design matrix and response, the solver's sole data input."""

    X: np.ndarray  # (n, d)
    y: np.ndarray  # (n,)

    def __post_init__(self):
        if self.X.ndim != 2 or self.y.ndim != 1 or self.X.shape[0] != self.y.shape[0]:
            raise DimensionError(
                f"inconsistent dataset shapes X={self.X.shape}, y={self.y.shape}"
            )
        if not (np.all(np.isfinite(self.X)) and np.all(np.isfinite(self.y))):
            raise DimensionError("dataset entries must be finite")

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def d(self) -> int:
        return self.X.shape[1]


def half_split_signs(n: int) -> np.ndarray:
    """ceil(n/2) leading +1 entries, the rest -1."""
    z = np.full(n, -1, dtype=np.int64)
    z[: (n + 1) // 2] = 1
    return z


def make_ground_truth(cfg: GenerativeConfig) -> GroundTruth:
    """Draw (w*, z*, S) for one instance.

    The support is a uniformly random s-subset (indices of the s smallest
    uniform keys). Nonzero entries are uniform on [-1, 1], then any entry
    with magnitude below ``min_signal`` is pushed to
    ``sign * min_signal`` (sign of an exact zero counts as +1).
    """
    keys = SplitMix64(substream_seed(cfg.seed, _TAG_SUPPORT)).uniforms(cfg.d)
    support = tuple(sorted(np.argsort(keys, kind="stable")[: cfg.s].tolist()))

    raw = 2.0 * SplitMix64(substream_seed(cfg.seed, _TAG_WSTAR)).uniforms(cfg.s) - 1.0
    signs = np.where(raw < 0, -1.0, 1.0)
    values = np.where(np.abs(raw) < cfg.min_signal, signs * cfg.min_signal, raw)

    w_star = np.zeros(cfg.d)
    w_star[list(support)] = values

    z_star = half_split_signs(cfg.n)
    if cfg.shuffle_z:
        perm_keys = SplitMix64(substream_seed(cfg.seed, _TAG_ZPERM)).uniforms(cfg.n)
        z_star = z_star[np.argsort(perm_keys, kind="stable")]

    return GroundTruth(w_star=w_star, z_star=z_star, support=support, gamma=cfg.gamma)


def response(X: np.ndarray, w_star: np.ndarray, z_star: np.ndarray,
             gamma: float, e: np.ndarray | None = None) -> np.ndarray:
    """Evaluate the mechanism ``y = X w* + gamma z* + e`` exactly."""
    X = np.asarray(X, dtype=np.float64)
    y = X @ np.asarray(w_star, dtype=np.float64) + gamma * np.asarray(
        z_star, dtype=np.float64
    )
    if e is not None:
        y = y + np.asarray(e, dtype=np.float64)
    return y


def generate_dataset(truth: GroundTruth, cfg: GenerativeConfig) -> Dataset:
    """Sample (X, y) from the mechanism for a given ground truth."""
    if truth.w_star.shape[0] != cfg.d or truth.z_star.shape[0] != cfg.n:
        raise ConfigError("ground truth dimensions do not match the config")
    if cfg.n < 2:
        raise ConfigError("need n >= 2")
    X = gaussian_sample(cfg.n, cfg.d, substream_seed(cfg.seed, _TAG_X),
                        scale=cfg.column_std)
    e = gaussian_sample(cfg.n, 1, substream_seed(cfg.seed, _TAG_NOISE),
                        scale=cfg.noise_std)[:, 0]
    return Dataset(X=X, y=response(X, truth.w_star, truth.z_star, truth.gamma, e))


def make_instance(cfg: GenerativeConfig) -> tuple[GroundTruth, Dataset]:
    """Convenience: ground truth plus a dataset drawn from it."""
    truth = make_ground_truth(cfg)
    return truth, generate_dataset(truth, cfg)

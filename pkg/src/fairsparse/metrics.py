"""Recovery metrics for experiments."""

from __future__ import annotations

import numpy as np

from .errors import ConfigError


def metric_jaccard(S, S_hat) -> float:
    """|S n S_hat| / |S u S_hat|; two empty sets count as 1."""
    a, b = set(S), set(S_hat)
    if not a and not b:
        return 1.0
    return len(a & b) / len(a | b)


def _as_sign_vector(z) -> np.ndarray:
    z = np.asarray(z)
    out = z.astype(np.int64)
    if not np.array_equal(out, z) or not np.all(np.abs(out) == 1):
        raise ConfigError("attribute vectors must contain only +/-1")
    return out


def metric_exact_z(z, z_hat) -> int:
    """1 iff the rank-one sign matrices built from z and z_hat coincide,
    i.e. z == z_hat or z == -z_hat entrywise; else 0."""
    a = _as_sign_vector(z)
    b = _as_sign_vector(z_hat)
    if a.shape != b.shape:
        raise ConfigError(f"length mismatch {a.shape} vs {b.shape}")
    return int(np.array_equal(a, b) or np.array_equal(a, -b))


def metric_exact_z_aligned(z, z_hat) -> int:
    """1 iff z == z_hat entrywise (orientation-sensitive variant)."""
    a = _as_sign_vector(z)
    b = _as_sign_vector(z_hat)
    if a.shape != b.shape:
        raise ConfigError(f"length mismatch {a.shape} vs {b.shape}")
    return int(np.array_equal(a, b))

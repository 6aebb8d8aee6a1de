"""Dense symmetric linear algebra and seeded Gaussian sampling.

Every random draw in this package flows through :class:`SplitMix64` so
that results are bit-reproducible for a fixed seed, independent of any
library RNG. The generator is fully specified here:

* state sequence: ``state_i = seed + i * 0x9E3779B97F4A7C15 (mod 2**64)``
* output: the splitmix64 finalizer
  ``z ^= z >> 30; z *= 0xBF58476D1CE4E5B9; z ^= z >> 27;
  z *= 0x94D049BB133111EB; z ^= z >> 31``
* uniforms on (0, 1]: ``((output >> 11) + 1) * 2**-53``
* normals: Box-Muller on consecutive uniform pairs ``(u1, u2)``,
  emitting ``sqrt(-2 ln u1) * cos(2 pi u2)`` then
  ``sqrt(-2 ln u1) * sin(2 pi u2)``.

Tolerances below are module defaults and can be overridden per call.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionError, SingularMatrixError

# default tolerances
SYM_RTOL = 1e-12        # relative asymmetry allowed in "symmetric" inputs
CHOL_PD_RTOL = 1e-10    # pivot floor relative to trace(A)/n

_MASK64 = (1 << 64) - 1
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX_A = np.uint64(0xBF58476D1CE4E5B9)
_MIX_B = np.uint64(0x94D049BB133111EB)


def _mix64(z: np.ndarray) -> np.ndarray:
    """splitmix64 finalizer, elementwise on uint64 arrays."""
    z = (z ^ (z >> np.uint64(30))) * _MIX_A
    z = (z ^ (z >> np.uint64(27))) * _MIX_B
    return z ^ (z >> np.uint64(31))


class SplitMix64:
    """Deterministic stream of uint64s, uniforms and standard normals."""

    def __init__(self, seed: int):
        self._state = np.uint64(seed & _MASK64)

    def raw(self, count: int) -> np.ndarray:
        """Next ``count`` uint64 outputs."""
        if count < 0:
            raise DimensionError("count must be >= 0")
        if count == 0:
            return np.empty(0, dtype=np.uint64)
        with np.errstate(over="ignore"):
            states = self._state + np.arange(1, count + 1, dtype=np.uint64) * _GOLDEN
            self._state = states[-1]
            return _mix64(states)

    def uniforms(self, count: int) -> np.ndarray:
        """i.i.d. uniforms on (0, 1]."""
        return ((self.raw(count) >> np.uint64(11)) + np.uint64(1)).astype(
            np.float64
        ) * 2.0**-53

    def normals(self, count: int) -> np.ndarray:
        """i.i.d. standard normals via Box-Muller."""
        pairs = (count + 1) // 2
        u = self.uniforms(2 * pairs)
        u1, u2 = u[0::2], u[1::2]
        radius = np.sqrt(-2.0 * np.log(u1))
        angle = 2.0 * np.pi * u2
        out = np.empty(2 * pairs)
        out[0::2] = radius * np.cos(angle)
        out[1::2] = radius * np.sin(angle)
        return out[:count]


def substream_seed(seed: int, index: int) -> int:
    """Derived seed for an independent substream.

    Defined as ``mix64(mix64(seed) + index * 0x9E3779B97F4A7C15)`` on
    uint64 arithmetic; documented so derived streams are reproducible.
    """
    with np.errstate(over="ignore"):
        base = _mix64(np.array([seed & _MASK64], dtype=np.uint64))
        tagged = base + np.uint64(index & _MASK64) * _GOLDEN
        return int(_mix64(tagged)[0])


def gaussian_sample(rows: int, cols: int, seed: int, scale=1.0) -> np.ndarray:
    """Seeded (rows x cols) matrix with independent N(0, scale_j^2) entries.

    ``scale`` is a scalar or a length-``cols`` sequence of per-column
    standard deviations. Entries are drawn row-major from the seeded
    stream, so the same seed always yields the same matrix.
    """
    if rows < 1 or cols < 1:
        raise DimensionError(f"need rows, cols >= 1, got {rows}x{cols}")
    scale_vec = np.broadcast_to(np.asarray(scale, dtype=np.float64), (cols,))
    if np.any(scale_vec < 0):
        raise DimensionError("column scales must be >= 0")
    g = SplitMix64(seed).normals(rows * cols).reshape(rows, cols)
    return g * scale_vec


@dataclass(frozen=True)
class EigenDecomposition:
    """Full symmetric eigendecomposition, eigenvalues sorted ascending."""

    values: np.ndarray   # shape (n,), ascending
    vectors: np.ndarray  # shape (n, n), orthonormal columns


def _check_square_symmetric(A: np.ndarray, rtol: float, what: str) -> np.ndarray:
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionError(f"{what} requires a square matrix, got shape {A.shape}")
    scale = max(1.0, float(np.max(np.abs(A))) if A.size else 0.0)
    if float(np.max(np.abs(A - A.T))) > rtol * scale:
        raise DimensionError(f"{what} requires a symmetric matrix")
    return A


def sym_eig(A: np.ndarray, *, rtol: float = SYM_RTOL) -> EigenDecomposition:
    """Eigendecomposition of a symmetric matrix.

    Raises :class:`DimensionError` for non-square or asymmetric input.
    """
    A = _check_square_symmetric(A, rtol, "sym_eig")
    values, vectors = np.linalg.eigh(0.5 * (A + A.T))
    return EigenDecomposition(values=values, vectors=vectors)


def cholesky_solve(A: np.ndarray, B: np.ndarray, *,
                   pd_rtol: float = CHOL_PD_RTOL) -> np.ndarray:
    """Solve ``A X = B`` for symmetric positive-definite ``A``.

    Factorizes ``A = L L^T`` explicitly so a failed pivot can be
    reported by index via :class:`SingularMatrixError`. ``B`` may be a
    vector or a matrix; the result matches its shape.
    """
    A = _check_square_symmetric(A, SYM_RTOL, "cholesky_solve")
    n = A.shape[0]
    B = np.asarray(B, dtype=np.float64)
    vector_rhs = B.ndim == 1
    Bmat = B[:, None] if vector_rhs else B
    if Bmat.ndim != 2 or Bmat.shape[0] != n:
        raise DimensionError(
            f"right-hand side shape {B.shape} does not match system size {n}"
        )

    floor = pd_rtol * float(np.trace(A)) / n
    L = np.zeros((n, n))
    for j in range(n):
        pivot = A[j, j] - L[j, :j] @ L[j, :j]
        if pivot <= floor:
            raise SingularMatrixError(pivot_index=j, pivot_value=float(pivot))
        L[j, j] = math.sqrt(pivot)
        if j + 1 < n:
            L[j + 1:, j] = (A[j + 1:, j] - L[j + 1:, :j] @ L[j, :j]) / L[j, j]

    Y = scipy.linalg.solve_triangular(L, Bmat, lower=True)
    X = scipy.linalg.solve_triangular(L.T, Y, lower=False)
    return X[:, 0] if vector_rhs else X

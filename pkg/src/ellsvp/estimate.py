"""Discrete l-estimate ``f~(A) = sum_x p_x ||A x||_K`` and Monte-Carlo references.

The grid sums are the deterministic algorithm path.  The Monte-Carlo helpers
are verification oracles only; they are seeded and use one Philox stream per
fixed-size chunk, so results do not depend on evaluation order.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .bodies import ConvexBody
from .errors import DimensionMismatchError
from .grid import GaussGrid

MC_CHUNK = 1 << 16


def _check_dims(body: ConvexBody, grid: GaussGrid, A=None):
    if body.dim != grid.dim:
        raise DimensionMismatchError(f"body has dim {body.dim}, grid has dim {grid.dim}")
    if A is not None:
        A = np.asarray(A, dtype=float)
        if A.shape != (body.dim, body.dim):
            raise DimensionMismatchError(f"matrix shape {A.shape} does not match dim {body.dim}")
        if not np.all(np.isfinite(A)):
            raise ValueError("matrix entries must be finite")
        return A


def _images(grid: GaussGrid, A: np.ndarray) -> np.ndarray:
    X = grid.vectors
    return (X[:, None, :] * A[None, :, :]).sum(axis=-1)


def l_tilde(body: ConvexBody, grid: GaussGrid) -> float:
    """``sum_x p_x ||x||_K`` over the grid, exactly rounded summation in grid order."""
    _check_dims(body, grid)
    return math.fsum(grid.weights * body.norm(grid.vectors))


def f_tilde(body: ConvexBody, grid: GaussGrid, A) -> float:
    A = _check_dims(body, grid, A)
    return math.fsum(grid.weights * body.norm(_images(grid, A)))


def f_tilde_subgradient(body: ConvexBody, grid: GaussGrid, A) -> np.ndarray:
    """``G = sum_x p_x g_x x^T`` with ``g_x`` a subgradient of ``||.||_K`` at ``A x``."""
    A = _check_dims(body, grid, A)
    X = grid.vectors
    g = body.subgradient(_images(grid, A))
    return (grid.weights[:, None] * g).T @ X


def f_tilde_with_subgradient(body: ConvexBody, grid: GaussGrid, A) -> tuple[float, np.ndarray]:
    A = _check_dims(body, grid, A)
    X = grid.vectors
    Y = _images(grid, A)
    value = math.fsum(grid.weights * body.norm(Y))
    G = (grid.weights[:, None] * body.subgradient(Y)).T @ X
    return value, G


class MCEstimate(NamedTuple):
    mean: float
    std_error: float


def _chunk_rng(seed: int, chunk: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=[seed & (2**64 - 1), chunk]))


def _mc_moments(values_of_chunk, samples: int, seed: int) -> MCEstimate:
    sums, sqs = [], []
    done, chunk = 0, 0
    while done < samples:
        m = min(MC_CHUNK, samples - done)
        v = values_of_chunk(_chunk_rng(seed, chunk), m)
        sums.append(math.fsum(v))
        sqs.append(math.fsum(v * v))
        done += m
        chunk += 1
    mean = math.fsum(sums) / samples
    var = max(math.fsum(sqs) / samples - mean * mean, 0.0) * samples / (samples - 1)
    return MCEstimate(mean, math.sqrt(var / samples))


def mc_f_estimate(body: ConvexBody, A, samples: int, seed: int) -> MCEstimate:
    """Monte-Carlo estimate of ``E ||A X||_K`` for a standard Gaussian ``X``."""
    if samples < 1000:
        raise ValueError("use at least 1000 samples")
    A = np.asarray(A, dtype=float)
    n = body.dim

    def chunk(rng, m):
        X = rng.standard_normal((m, n))
        return body.norm(X @ A.T)

    return _mc_moments(chunk, samples, seed)


class UniformGaussianCheck(NamedTuple):
    lhs: float  # E ||U||_K, U uniform on [-1/2, 1/2]^n
    rhs: float  # E ||X||_K / sqrt(2 pi)
    lhs_se: float
    rhs_se: float

    @property
    def combined_se(self) -> float:
        return math.hypot(self.lhs_se, self.rhs_se)


def uniform_vs_gaussian_check(body: ConvexBody, samples: int, seed: int) -> UniformGaussianCheck:
    n = body.dim
    c = 1.0 / math.sqrt(2 * math.pi)
    u = _mc_moments(lambda rng, m: body.norm(rng.random((m, n)) - 0.5), samples, seed)
    g = _mc_moments(lambda rng, m: c * body.norm(rng.standard_normal((m, n))), samples, seed + 1)
    return UniformGaussianCheck(u.mean, g.mean, u.std_error, g.std_error)

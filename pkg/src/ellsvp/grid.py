"""Gaussian discretization grid on (1/s) Z^n.

The grid spacing ``1/s`` and the cells ``x + C_s`` with ``C_s = [-1/(2s), 1/(2s)]^n``
tile R^n.  Each retained grid point carries the standard Gaussian mass of its cell.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import CapExceededError

DEFAULT_MAX_DIM = 10


class GridMode(str, enum.Enum):
    THEOREM_SET = "THEOREM_SET"  # (1/s)Z^n  intersected with  C_s + 2 sqrt(n) B2
    BALL3_SET = "BALL3_SET"  # (1/s)Z^n  intersected with  3 sqrt(n) B2


def grid_sigma(n: int) -> float:
    """Grid parameter ``s = sqrt(ln(2(2n+1)) / pi) / sqrt(2 pi)`` (natural log)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return (1.0 / math.sqrt(2 * math.pi)) * math.sqrt(math.log(2 * (2 * n + 1)) / math.pi)


@dataclass(frozen=True)
class GridParams:
    dim: int
    s: float
    mode: GridMode = GridMode.THEOREM_SET

    @classmethod
    def for_dim(cls, n: int, mode: GridMode | str = GridMode.THEOREM_SET) -> "GridParams":
        return cls(n, grid_sigma(n), GridMode(mode))

    @property
    def half_cell(self) -> float:
        return 1.0 / (2.0 * self.s)


@dataclass(frozen=True, eq=False)
class GaussGrid:
    """Grid points ``z / s`` (``points`` holds the integer vectors ``z``) and cell masses."""

    params: GridParams
    points: np.ndarray
    weights: np.ndarray

    @property
    def dim(self) -> int:
        return self.params.dim

    @property
    def size(self) -> int:
        return len(self.points)

    @property
    def vectors(self) -> np.ndarray:
        return self.points / self.params.s

    def total_mass(self) -> float:
        return math.fsum(self.weights)


def _in_region(Z: np.ndarray, params: GridParams) -> np.ndarray:
    n, s = params.dim, params.s
    if params.mode is GridMode.THEOREM_SET:
        # squared distance from the origin to the cell z/s + C_s
        gap = np.maximum(np.abs(Z) - 0.5, 0.0) / s
        return (gap * gap).sum(axis=1) <= 4.0 * n
    X = Z / s
    return (X * X).sum(axis=1) <= 9.0 * n


def size_estimate(params: GridParams) -> float:
    """Volume bound ``4^n vol(sqrt(n) B2) s^n`` on the number of grid points."""
    n = params.dim
    unit_ball = math.pi ** (n / 2) / math.gamma(n / 2 + 1)
    return 4.0 ** n * unit_ball * n ** (n / 2) * params.s ** n


def _encode(Z: np.ndarray, base: int, offset: int) -> np.ndarray:
    code = np.zeros(len(Z), dtype=np.int64)
    for j in range(Z.shape[1]):
        code = code * base + (Z[:, j] + offset)
    return code


def enumerate_grid(params: GridParams, max_dim: int = DEFAULT_MAX_DIM) -> GaussGrid:
    """Breadth-first search from the origin over +-e_i neighbours.

    The region is convex and symmetric and contains the origin's cell, so
    every grid point in it is connected to the origin through the region.
    Output is sorted lexicographically on the integer coordinates.
    """
    n = params.dim
    if n > max_dim:
        raise CapExceededError(
            f"grid dimension {n} exceeds cap {max_dim} (|D| ~ {size_estimate(params):.3g})",
            estimate=size_estimate(params),
        )
    radius = 2.0 * math.sqrt(n) * params.s + 1.0 if params.mode is GridMode.THEOREM_SET \
        else 3.0 * math.sqrt(n) * params.s
    offset = int(math.ceil(radius)) + 1
    base = 2 * offset + 1
    steps = np.vstack([np.eye(n, dtype=np.int64), -np.eye(n, dtype=np.int64)])

    frontier = np.zeros((1, n), dtype=np.int64)
    seen = _encode(frontier, base, offset)
    layers = [frontier]
    while len(frontier):
        cand = (frontier[:, None, :] + steps[None, :, :]).reshape(-1, n)
        codes, first = np.unique(_encode(cand, base, offset), return_index=True)
        cand = cand[first]
        fresh = ~np.isin(codes, seen, assume_unique=True)
        cand, codes = cand[fresh], codes[fresh]
        keep = _in_region(cand, params)
        frontier = cand[keep]
        seen = np.union1d(seen, codes[keep])
        layers.append(frontier)
    Z = np.vstack(layers)
    Z = Z[np.lexsort(Z.T[::-1])]
    return GaussGrid(params, Z, weight(Z, params))


def _interval_mass(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Standard normal mass of ``[a, b]`` accurate in both tails."""
    out = np.empty_like(a, dtype=float)
    sqrt2 = math.sqrt(2.0)
    for idx in np.ndindex(a.shape):
        lo, hi = float(a[idx]), float(b[idx])
        if lo >= 0:
            out[idx] = 0.5 * (math.erfc(lo / sqrt2) - math.erfc(hi / sqrt2))
        elif hi <= 0:
            out[idx] = 0.5 * (math.erfc(-hi / sqrt2) - math.erfc(-lo / sqrt2))
        else:
            out[idx] = 1.0 - 0.5 * (math.erfc(-lo / sqrt2) + math.erfc(hi / sqrt2))
    return out


def weight(z, params: GridParams):
    """Gaussian mass ``p_x`` of the cell ``z/s + C_s`` as a product of 1-D masses."""
    z = np.asarray(z)
    single = z.ndim == 1
    Z = np.atleast_2d(z).astype(np.int64)
    s, h = params.s, params.half_cell
    # 1-D masses depend only on |z_i|; tabulate them once
    kmax = int(np.abs(Z).max()) if Z.size else 0
    k = np.arange(kmax + 1, dtype=float)
    table = _interval_mass(k / s - h, k / s + h)
    w = table[np.abs(Z)].prod(axis=1)
    return float(w[0]) if single else w


def gaussian_tail_bound(n: int, t: float) -> float:
    """Upper bound on ``Pr(||X|| >= t sqrt(n))`` for a standard Gaussian X, ``t >= 1``."""
    if t < 1:
        raise ValueError("t must be >= 1")
    t2 = t * t
    return math.exp(-(1.0 - (1.0 + math.log(t2)) / t2) * 0.5 * n * t2)


def discrete_gaussian_mass(c, s: float, truncation: int) -> float:
    """``rho_s(Z^n + c) = sum_z exp(-pi ||(z + c)/s||^2)`` over ``||z||_inf <= truncation``."""
    c = np.atleast_1d(np.asarray(c, dtype=float))
    k = np.arange(-truncation, truncation + 1, dtype=float)
    # the sum factorizes over coordinates
    factors = [math.fsum(np.exp(-math.pi * ((k + ci) / s) ** 2)) for ci in c]
    return math.prod(factors)


def lemma_band(n: int, s: float) -> tuple[float, float, float]:
    """Largest ``t`` allowed by ``s >= sqrt(ln(2(t+1))/pi)`` and the band ``(1 -+ 1/t)^n s^n``."""
    t = math.exp(math.pi * s * s) / 2.0 - 1.0
    return t, (1 - 1 / t) ** n * s ** n, (1 + 1 / t) ** n * s ** n

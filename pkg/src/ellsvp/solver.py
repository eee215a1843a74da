"""Minimize ``f~(A)`` over ``{A >= 0, det A >= 1, ||A||_op <= 2 n^{3/2}}``.

Symmetric matrices are identified with R^N, ``N = n(n+1)/2``, through an
isometric vectorization (off-diagonal entries scaled by sqrt(2)), so the
Frobenius geometry is preserved.  The search is a central-cut ellipsoid method
started from the ball of radius ``3 n^2`` around ``n^{3/2} I``; the region
contains the ball of radius ``n^{3/2} - 1`` around the same centre, which
yields the stopping certificate.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .bodies import ConvexBody, is_normalized
from .errors import NotNormalizedError
from .estimate import f_tilde, f_tilde_with_subgradient
from .grid import GaussGrid, GridMode


class SolveStatus(str, enum.Enum):
    OPTIMAL_WITHIN_EPS = "OPTIMAL_WITHIN_EPS"
    ITERATION_LIMIT = "ITERATION_LIMIT"


@dataclass(frozen=True)
class SolverConfig:
    epsilon: float = 0.1
    max_iterations: int = 50_000
    feasibility_tol: float = 1e-9
    mode: GridMode = GridMode.THEOREM_SET

    def __post_init__(self):
        if not 0 < self.epsilon <= 1:
            raise ValueError("epsilon must lie in (0, 1]")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")
        if not self.feasibility_tol > 0:
            raise ValueError("feasibility_tol must be positive")


@dataclass(frozen=True, eq=False)
class SolveResult:
    A_opt: np.ndarray
    value: float
    iterations: int
    certified_gap: float
    status: SolveStatus
    lower_bound: float = 0.0


@dataclass(frozen=True, eq=False)
class Ellipsoid:
    """The set ``{shape @ u : ||u||_2 <= radius}``."""

    shape: np.ndarray
    radius: float

    def __post_init__(self):
        A = np.array(self.shape, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError("shape must be square")
        if not self.radius > 0:
            raise ValueError("radius must be positive")
        A.setflags(write=False)
        object.__setattr__(self, "shape", A)

    @property
    def dim(self) -> int:
        return self.shape.shape[0]

    @property
    def volume(self) -> float:
        n = self.dim
        unit = math.pi ** (n / 2) / math.gamma(n / 2 + 1)
        return self.radius ** n * abs(float(np.linalg.det(self.shape))) * unit

    def scaled(self, c: float) -> "Ellipsoid":
        return Ellipsoid(self.shape, self.radius * c)

    def unit(self) -> "Ellipsoid":
        return Ellipsoid(self.shape, 1.0)

    def gauge(self, x) -> np.ndarray:
        """``||shape^{-1} x||_2 / radius``; at most 1 exactly on the ellipsoid."""
        y = np.linalg.solve(self.shape, np.atleast_2d(x).T).T
        return np.sqrt((y * y).sum(axis=1)) / self.radius

    def contains(self, x) -> np.ndarray:
        return self.gauge(x) <= 1.0


def svec(A: np.ndarray) -> np.ndarray:
    n = A.shape[0]
    iu = np.triu_indices(n, 1)
    return np.concatenate([np.diag(A), math.sqrt(2.0) * A[iu]])


def smat(v: np.ndarray, n: int) -> np.ndarray:
    A = np.diag(v[:n]).astype(float)
    iu = np.triu_indices(n, 1)
    A[iu] = v[n:] / math.sqrt(2.0)
    A[(iu[1], iu[0])] = A[iu]
    return A


def opnorm_bound(n: int) -> float:
    return 2.0 * n ** 1.5


def region_lower_constant(n: int, s: float) -> float:
    """``0.5 sqrt(2/pi) (1 - 1/s) / sqrt(n)``; nonpositive whenever ``s <= 1``."""
    return 0.5 * math.sqrt(2.0 / math.pi) * (1.0 - 1.0 / s) / math.sqrt(n)


def _value_upper_bound(body: ConvexBody, grid: GaussGrid, n: int) -> float:
    # ||A x||_K <= ||A||_op ||x||_2 / r on the whole region
    X = grid.vectors
    second = math.fsum(grid.weights * np.sqrt((X * X).sum(axis=1)))
    return opnorm_bound(n) * second / body.sandwich_r


def _cut(kind_dir: np.ndarray, P: np.ndarray):
    Pg = P @ kind_dir
    return Pg / math.sqrt(float(kind_dir @ Pg))


def solve_ell_program(body: ConvexBody, grid: GaussGrid, cfg: SolverConfig = SolverConfig()) -> SolveResult:
    if not is_normalized(body):
        raise NotNormalizedError(
            f"solver needs B2 <= K <= n B2, got r={body.sandwich_r:.6g}, R={body.sandwich_R:.6g}"
        )
    n = body.dim
    N = n * (n + 1) // 2
    bound = opnorm_bound(n)
    r_inner = n ** 1.5 - 1.0
    upper = _value_upper_bound(body, grid, n)
    proven_lower = max(region_lower_constant(n, grid.params.s), 0.0)

    c = svec(n ** 1.5 * np.eye(n))
    P = (3.0 * n * n) ** 2 * np.eye(N)
    logdet = N * math.log((3.0 * n * n) ** 2)
    if N > 1:
        shrink = N * math.log(N * N / (N * N - 1.0)) + math.log(1.0 - 2.0 / (N + 1))
    else:
        shrink = math.log(0.25)

    best_A, best_val = None, math.inf
    gap = math.inf
    status = SolveStatus.ITERATION_LIMIT
    it = 0
    while it < cfg.max_iterations:
        it += 1
        A = smat(c, n)
        lam, V = np.linalg.eigh(A)
        if lam[0] <= 0:
            g = -np.outer(V[:, 0], V[:, 0])
        elif float(np.log(lam).sum()) < 0:
            g = -(V / lam) @ V.T
        elif lam[-1] > bound:
            g = np.outer(V[:, -1], V[:, -1])
        else:
            val, G = f_tilde_with_subgradient(body, grid, A)
            if val < best_val:
                best_val, best_A = val, A
            g = 0.5 * (G + G.T)

        # certificate: every point of x* + alpha (R - x*) with alpha above the
        # current volume ratio has been cut by an objective cut
        alpha = math.exp(logdet / (2 * N)) / r_inner
        if best_A is not None and alpha < 1:
            add_gap = alpha * upper
            lower = max(proven_lower, best_val - add_gap)
            if lower > 0:
                gap = add_gap / lower
                if gap <= cfg.epsilon:
                    status = SolveStatus.OPTIMAL_WITHIN_EPS
                    break

        gv = svec(g)
        if not np.any(gv):
            # zero subgradient: A minimizes f~ over all matrices
            gap = 0.0
            status = SolveStatus.OPTIMAL_WITHIN_EPS
            break
        b = _cut(gv, P)
        if N > 1:
            c = c - b / (N + 1)
            P = (N * N / (N * N - 1.0)) * (P - (2.0 / (N + 1)) * np.outer(b, b))
            P = 0.5 * (P + P.T)
        else:
            c = c - b / 2
            P = P / 4
        logdet += shrink

    if best_A is None:
        raise RuntimeError("no feasible iterate found; increase max_iterations")
    # scaling to det = 1 keeps feasibility and can only lower the value
    sign, ld = np.linalg.slogdet(best_A)
    A_opt = best_A / math.exp(ld / n) if ld > 0 else best_A
    value = f_tilde(body, grid, A_opt)
    lower = max(proven_lower, best_val - alpha * upper) if alpha < 1 else proven_lower
    return SolveResult(A_opt, value, it, gap, status, lower)


def build_ellipsoid(A, value: float, n: int) -> Ellipsoid:
    """``E = (sqrt(n) / value) A B2``."""
    if not value > 0:
        raise ValueError("value must be positive")
    return Ellipsoid(np.asarray(A, dtype=float), math.sqrt(n) / value)

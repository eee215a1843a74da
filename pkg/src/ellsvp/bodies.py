"""Symmetric convex bodies: gauge norms, subgradients, membership and rounding.

Every body is origin-symmetric and carries Euclidean sandwiching radii
``r * B2 <= K <= R * B2``.  Norm evaluation accepts a single vector of shape
``(n,)`` or a batch of shape ``(m, n)``; batch rows are evaluated with
elementwise arithmetic so a row's value does not depend on the batch it is in.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import OracleInconsistencyError, UnsupportedRoundingError

_SANDWICH_SLACK = 1e-9
_VERTEX_SOLVE_CAP = 200_000


class ConvexBody:
    """Base class for origin-symmetric convex bodies in R^n."""

    kind: str = "ABSTRACT"
    dim: int
    sandwich_r: float
    sandwich_R: float

    def norm(self, x):
        raise NotImplementedError

    def subgradient(self, x):
        raise NotImplementedError

    def contains(self, x):
        return self.norm(x) <= 1.0

    def linear_image(self, T) -> "ConvexBody":
        """Return the body ``T K``."""
        return LinearImage(np.asarray(T, dtype=float), self)

    def scaled(self, c: float) -> "ConvexBody":
        return self.linear_image(c * np.eye(self.dim))

    @property
    def analytic(self) -> bool:
        return True

    def _check(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dim:
            raise ValueError(f"expected vectors of dimension {self.dim}, got shape {x.shape}")
        return x


def _rowwise_dot(X, M):
    """``X @ M.T`` computed without BLAS so each row is batch-independent."""
    return (X[..., None, :] * M).sum(axis=-1)


@dataclass(frozen=True, eq=False)
class LpBall(ConvexBody):
    """``radius * {x : ||x||_p <= 1}`` for ``1 <= p <= inf``."""

    dim: int
    p: float = 2.0
    radius: float = 1.0
    kind = "L_P_BALL"

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be positive")
        if not (self.p >= 1):
            raise ValueError("p must be >= 1")
        if not self.radius > 0:
            raise ValueError("radius must be positive")

    @property
    def sandwich_r(self) -> float:
        if self.p >= 2:
            return float(self.radius)
        return float(self.radius * self.dim ** (0.5 - 1.0 / self.p))

    @property
    def sandwich_R(self) -> float:
        if self.p <= 2:
            return float(self.radius)
        q = 0.0 if math.isinf(self.p) else 1.0 / self.p
        return float(self.radius * self.dim ** (0.5 - q))

    def norm(self, x):
        x = self._check(x)
        a = np.abs(x)
        if math.isinf(self.p):
            v = a.max(axis=-1)
        elif self.p == 1:
            v = a.sum(axis=-1)
        elif self.p == 2:
            v = np.sqrt((x * x).sum(axis=-1))
        else:
            # scale by the max coordinate so large p does not overflow
            m = a.max(axis=-1)
            safe = np.where(m > 0, m, 1.0)
            v = m * ((a / safe[..., None]) ** self.p).sum(axis=-1) ** (1.0 / self.p)
        return v / self.radius

    def subgradient(self, x):
        x = self._check(x)
        single = x.ndim == 1
        X = np.atleast_2d(x)
        a = np.abs(X)
        if math.isinf(self.p):
            G = np.zeros_like(X)
            idx = a.argmax(axis=-1)
            rows = np.arange(X.shape[0])
            G[rows, idx] = np.sign(X[rows, idx])
        elif self.p == 1:
            G = np.sign(X)
        else:
            nrm = self.norm(X) * self.radius
            safe = np.where(nrm > 0, nrm, 1.0)
            G = np.sign(X) * (a / safe[:, None]) ** (self.p - 1)
        G = G / self.radius
        return G[0] if single else G

    def linear_image(self, T):
        T = np.asarray(T, dtype=float)
        c = T[0, 0]
        if c > 0 and np.array_equal(T, c * np.eye(self.dim)):
            return LpBall(self.dim, self.p, self.radius * c)
        return super().linear_image(T)

    def to_dict(self) -> dict:
        p = "inf" if math.isinf(self.p) else self.p
        return {"kind": self.kind, "dim": self.dim, "parameters": {"p": p, "radius": self.radius}}


def _polytope_circumradius(rows: np.ndarray) -> float:
    """Largest Euclidean norm over the vertices of ``{x : |<a_i, x>| <= 1}``.

    Falls back to the bound ``sqrt(m) / sigma_min(rows)`` when the vertex
    enumeration would need too many linear solves.
    """
    m, n = rows.shape
    n_subsets = math.comb(m, n)
    if n_subsets * 2 ** (n - 1) > _VERTEX_SOLVE_CAP:
        smin = np.linalg.svd(rows, compute_uv=False)[-1]
        return float(math.sqrt(m) / smin)
    signs = np.array([(1.0,) + s for s in itertools.product((1.0, -1.0), repeat=n - 1)])
    best = 0.0
    for subset in itertools.combinations(range(m), n):
        M = rows[list(subset)]
        if abs(np.linalg.det(M)) < 1e-12 * np.prod(np.linalg.norm(M, axis=1)):
            continue
        V = np.linalg.solve(M, signs.T).T
        ok = np.abs(V @ rows.T).max(axis=1) <= 1 + 1e-9
        if ok.any():
            best = max(best, float(np.sqrt((V[ok] ** 2).sum(axis=1)).max()))
    return best


@dataclass(frozen=True, eq=False)
class SymPolytope(ConvexBody):
    """``{x : |<a_i, x>| <= 1 for all rows a_i}``."""

    rows: np.ndarray
    kind = "SYM_POLYTOPE"
    _R: float = field(init=False, repr=False)

    def __post_init__(self):
        rows = np.array(self.rows, dtype=float)
        if rows.ndim != 2 or rows.shape[0] == 0:
            raise ValueError("rows must be a non-empty 2-D array")
        if np.linalg.matrix_rank(rows) < rows.shape[1]:
            raise ValueError("polytope rows do not span R^n; the body would be unbounded")
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "_R", _polytope_circumradius(rows))

    @property
    def dim(self) -> int:
        return self.rows.shape[1]

    @property
    def sandwich_r(self) -> float:
        return float(1.0 / np.sqrt((self.rows ** 2).sum(axis=1)).max())

    @property
    def sandwich_R(self) -> float:
        return self._R

    def norm(self, x):
        x = self._check(x)
        return np.abs(_rowwise_dot(x, self.rows)).max(axis=-1)

    def subgradient(self, x):
        x = self._check(x)
        single = x.ndim == 1
        X = np.atleast_2d(x)
        P = _rowwise_dot(X, self.rows)
        idx = np.abs(P).argmax(axis=1)
        rows = np.arange(X.shape[0])
        sgn = np.sign(P[rows, idx])
        G = sgn[:, None] * self.rows[idx]
        return G[0] if single else G

    def linear_image(self, T):
        T = np.asarray(T, dtype=float)
        return SymPolytope(self.rows @ np.linalg.inv(T))

    def to_dict(self) -> dict:
        return {"kind": self.kind, "dim": self.dim, "parameters": {"rows": self.rows.tolist()}}


@dataclass(frozen=True, eq=False)
class EllipsoidBody(ConvexBody):
    """``M * B2`` for a nonsingular matrix ``M``."""

    shape: np.ndarray
    kind = "ELLIPSOID_BODY"
    _inv: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        M = np.array(self.shape, dtype=float)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise ValueError("shape must be square")
        if np.linalg.matrix_rank(M) < M.shape[0]:
            raise ValueError("shape matrix must be nonsingular")
        M.setflags(write=False)
        object.__setattr__(self, "shape", M)
        object.__setattr__(self, "_inv", np.linalg.inv(M))

    @property
    def dim(self) -> int:
        return self.shape.shape[0]

    @property
    def sandwich_r(self) -> float:
        return float(np.linalg.svd(self.shape, compute_uv=False)[-1])

    @property
    def sandwich_R(self) -> float:
        return float(np.linalg.svd(self.shape, compute_uv=False)[0])

    def norm(self, x):
        x = self._check(x)
        y = _rowwise_dot(x, self._inv)
        return np.sqrt((y * y).sum(axis=-1))

    def subgradient(self, x):
        x = self._check(x)
        single = x.ndim == 1
        X = np.atleast_2d(x)
        Y = _rowwise_dot(X, self._inv)
        nrm = np.sqrt((Y * Y).sum(axis=-1))
        safe = np.where(nrm > 0, nrm, 1.0)
        G = _rowwise_dot(Y / safe[:, None], self._inv.T)
        G[nrm == 0] = 0.0
        return G[0] if single else G

    def linear_image(self, T):
        return EllipsoidBody(np.asarray(T, dtype=float) @ self.shape)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "dim": self.dim, "parameters": {"shape": self.shape.tolist()}}


@dataclass(frozen=True, eq=False)
class LinearImage(ConvexBody):
    """``T K`` for a nonsingular ``T``; uses ``||x||_{TK} = ||T^{-1} x||_K``."""

    T: np.ndarray
    inner: ConvexBody
    kind = "LINEAR_IMAGE"
    _inv: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        T = np.array(self.T, dtype=float)
        if T.shape != (self.inner.dim, self.inner.dim):
            raise ValueError("T must be square with the inner body's dimension")
        if np.linalg.matrix_rank(T) < T.shape[0]:
            raise ValueError("T must be nonsingular")
        T.setflags(write=False)
        object.__setattr__(self, "T", T)
        object.__setattr__(self, "_inv", np.linalg.inv(T))

    @property
    def dim(self) -> int:
        return self.inner.dim

    @property
    def sandwich_r(self) -> float:
        return float(self.inner.sandwich_r * np.linalg.svd(self.T, compute_uv=False)[-1])

    @property
    def sandwich_R(self) -> float:
        return float(self.inner.sandwich_R * np.linalg.svd(self.T, compute_uv=False)[0])

    @property
    def analytic(self) -> bool:
        return self.inner.analytic

    def norm(self, x):
        x = self._check(x)
        return self.inner.norm(_rowwise_dot(x, self._inv))

    def subgradient(self, x):
        x = self._check(x)
        g = self.inner.subgradient(_rowwise_dot(x, self._inv))
        return _rowwise_dot(g, self._inv.T)

    def linear_image(self, T):
        return LinearImage(np.asarray(T, dtype=float) @ self.T, self.inner)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "dim": self.dim,
            "parameters": {"T": self.T.tolist(), "inner": self.inner.to_dict()},
        }


@dataclass(frozen=True, eq=False)
class OracleBody(ConvexBody):
    """Body known only through a membership predicate.

    The predicate must be reentrant.  ``tolerance`` is the relative precision
    of the norm bisection.
    """

    predicate: Callable[[np.ndarray], bool]
    dim: int
    sandwich_r: float
    sandwich_R: float
    tolerance: float = 1e-10
    kind = "ORACLE"

    def __post_init__(self):
        if not 0 < self.sandwich_r <= self.sandwich_R:
            raise ValueError("need 0 < sandwich_r <= sandwich_R")
        if not 0 < self.tolerance <= 1e-9:
            raise ValueError("tolerance must lie in (0, 1e-9]")

    @property
    def analytic(self) -> bool:
        return False

    def contains(self, x):
        x = self._check(x)
        if x.ndim == 1:
            return bool(self.predicate(x))
        return np.array([bool(self.predicate(row)) for row in x])

    def _norm1(self, x: np.ndarray) -> float:
        e = float(np.sqrt(x @ x))
        if e == 0.0:
            return 0.0
        # widen by the tolerance so points exactly on the inner sphere are not misjudged
        lo, hi = e / self.sandwich_R * (1 - self.tolerance), e / self.sandwich_r * (1 + self.tolerance)
        if not self.predicate(x / hi):
            raise OracleInconsistencyError(
                f"point at distance sandwich_r along {x.tolist()} rejected by the oracle"
            )
        if self.predicate(x / lo):
            return lo
        while hi - lo > self.tolerance * hi:
            mid = 0.5 * (lo + hi)
            if self.predicate(x / mid):
                hi = mid
            else:
                lo = mid
        return 0.5 * (lo + hi)

    def norm(self, x):
        x = self._check(x)
        if x.ndim == 1:
            return self._norm1(x)
        return np.array([self._norm1(row) for row in x])

    def subgradient(self, x):
        x = self._check(x)
        if x.ndim > 1:
            return np.array([self.subgradient(row) for row in x])
        if not x.any():
            return np.zeros(self.dim)
        h = 1e-6 * max(1.0, float(np.sqrt(x @ x)))
        g = np.empty(self.dim)
        for i in range(self.dim):
            e = np.zeros(self.dim)
            e[i] = h
            g[i] = (self._norm1(x + e) - self._norm1(x - e)) / (2 * h)
        return g

    def to_dict(self) -> dict:
        raise TypeError("ORACLE bodies wrap a Python callable and cannot be serialized")


def norm(body: ConvexBody, x):
    """Gauge ``||x||_K = min{t >= 0 : x in tK}``."""
    return body.norm(x)


def subgradient(body: ConvexBody, x):
    """A vector ``g`` with ``<g, x> = ||x||_K`` and ``<g, y> <= ||y||_K``."""
    return body.subgradient(x)


def membership(body: ConvexBody, x):
    return body.contains(x)


def inscribed_ellipsoid(rows: np.ndarray, tol: float = 1e-7, max_iter: int = 100_000) -> np.ndarray:
    """Maximum-volume origin-centred ellipsoid ``M B2`` inside ``{|<a_i,x>| <= 1}``.

    Computed as the polar of the minimum-volume centred ellipsoid around
    ``{+-a_i}`` with Khachiyan's coordinate-ascent; ``M`` is shrunk at the end
    so that the returned ellipsoid is contained in the polytope exactly.
    """
    rows = np.asarray(rows, dtype=float)
    m, n = rows.shape
    u = np.full(m, 1.0 / m)
    for _ in range(max_iter):
        Q = (rows * u[:, None]).T @ rows
        lev = np.einsum("ij,jk,ik->i", rows, np.linalg.inv(Q), rows)
        j = int(lev.argmax())
        if lev[j] <= n * (1 + tol):
            break
        step = (lev[j] - n) / (n * (lev[j] - 1))
        u *= 1 - step
        u[j] += step
    w, V = np.linalg.eigh(n * Q)
    M = (V / np.sqrt(w)) @ V.T
    overshoot = np.sqrt(((rows @ M) ** 2).sum(axis=1)).max()
    return M / overshoot


def normalize(body: ConvexBody) -> tuple[ConvexBody, np.ndarray]:
    """Return ``(T K, T)`` with ``B2 <= T K <= n B2``.

    Bodies already sandwiched with ``R / r <= n`` are rescaled by
    ``1 / sandwich_r``.  Ellipsoids and polytopes are otherwise rounded with
    their (inscribed) John ellipsoid; linear images delegate to their inner body.
    """
    n = body.dim
    r, R = body.sandwich_r, body.sandwich_R
    if R <= n * r * (1 + _SANDWICH_SLACK):
        T = np.eye(n) / r
    elif isinstance(body, EllipsoidBody):
        T = np.linalg.inv(body.shape)
    elif isinstance(body, SymPolytope):
        T = np.linalg.inv(inscribed_ellipsoid(body.rows))
    elif isinstance(body, LinearImage) and body.inner.analytic:
        _, T_in = normalize(body.inner)
        T = T_in @ np.linalg.inv(body.T)
    else:
        raise UnsupportedRoundingError(
            f"{body.kind} body has R/r = {R / r:.4g} > n = {n}; "
            "supply a pre-rounded body"
        )
    rounded = body.linear_image(T)
    r2 = rounded.sandwich_r
    if abs(r2 - 1.0) > 1e-12:
        T = T / r2
        rounded = body.linear_image(T)
    if rounded.sandwich_R > n * (1 + 1e-6) * rounded.sandwich_r:
        raise UnsupportedRoundingError(
            f"rounding left R/r = {rounded.sandwich_R / rounded.sandwich_r:.4g} > n = {n}"
        )
    return rounded, T


def is_normalized(body: ConvexBody, tol: float = 1e-9) -> bool:
    return body.sandwich_r >= 1 - tol and body.sandwich_R <= body.dim * (1 + tol)

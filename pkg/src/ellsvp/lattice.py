"""Lattice bases, LLL reduction and Fincke-Pohst enumeration.

Bases are stored column-wise: the lattice is ``{B c : c in Z^n}``.  Integer
bases are reduced in exact rational arithmetic; float bases use the same
algorithm in floating point.  In both cases the unimodular transform is an
exact integer matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import CapExceededError

DEFAULT_NODE_CAP = 100_000_000
BOUNDARY_SLACK = 1e-12


@dataclass(frozen=True, eq=False)
class LatticeBasis:
    """Full-rank lattice basis; ``matrix[:, i]`` is the i-th basis vector.

    ``transform`` (when set) is the integer matrix ``U`` with
    ``matrix = original @ U``.
    """

    matrix: np.ndarray
    transform: np.ndarray | None = None

    def __post_init__(self):
        B = np.array(self.matrix)
        if B.ndim != 2 or B.shape[0] != B.shape[1]:
            raise ValueError("basis matrix must be square (full-rank lattices only)")
        if np.issubdtype(B.dtype, np.integer) or B.dtype == object:
            if not all(float(x).is_integer() for x in B.ravel()):
                raise ValueError("object-dtype bases must hold integers")
            B = B.astype(np.int64)
        else:
            B = B.astype(float)
        B.setflags(write=False)
        object.__setattr__(self, "matrix", B)
        if gram_determinant(self) <= 0:
            raise ValueError("basis vectors are linearly dependent")

    @classmethod
    def from_columns(cls, columns) -> "LatticeBasis":
        return cls(np.array(columns).T)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def is_integral(self) -> bool:
        return np.issubdtype(self.matrix.dtype, np.integer)

    @property
    def columns(self) -> np.ndarray:
        return self.matrix.T

    def vectors(self, coefficients) -> np.ndarray:
        """Lattice vectors ``B c`` for integer coefficient rows (exact for integer bases)."""
        C = np.asarray(coefficients, dtype=np.int64)
        if self.is_integral:
            return C @ self.matrix.T
        return C.astype(float) @ self.matrix.T

    def transformed(self, T) -> "LatticeBasis":
        return LatticeBasis(np.asarray(T, dtype=float) @ self.matrix.astype(float))


def _to_rows(basis: LatticeBasis, exact: bool):
    num = Fraction if exact else float
    return [[num(int(x)) if exact else float(x) for x in col] for col in basis.matrix.T], num


def _dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def _gso(b):
    n = len(b)
    bstar, Bn = [], []
    mu = [[0] * n for _ in range(n)]
    for i in range(n):
        v = list(b[i])
        for j in range(i):
            mu[i][j] = _dot(b[i], bstar[j]) / Bn[j]
            v = [vi - mu[i][j] * w for vi, w in zip(v, bstar[j])]
        bstar.append(v)
        Bn.append(_dot(v, v))
    return mu, Bn


def gram_determinant(basis: LatticeBasis):
    """``det(B^T B)``: an exact ``Fraction`` for integer bases, else a float."""
    if basis.is_integral:
        b, _ = _to_rows(basis, True)
        _, Bn = _gso(b)
        return math.prod(Bn)
    B = basis.matrix
    return float(np.linalg.det(B.T @ B))


def lll_reduce(basis: LatticeBasis, delta: float = 0.99) -> LatticeBasis:
    if not 0.25 < delta < 1:
        raise ValueError("delta must lie in (1/4, 1)")
    exact = basis.is_integral
    b, num = _to_rows(basis, exact)
    d = Fraction(delta).limit_denominator(10**6) if exact else delta
    n = len(b)
    U = [[int(i == j) for j in range(n)] for i in range(n)]  # row i: coefficients of b_i
    mu, Bn = _gso(b)
    k = 1
    while k < n:
        for j in range(k - 1, -1, -1):
            q = round(mu[k][j])
            if q:
                b[k] = [x - q * y for x, y in zip(b[k], b[j])]
                U[k] = [x - q * y for x, y in zip(U[k], U[j])]
                for i in range(j):
                    mu[k][i] -= q * mu[j][i]
                mu[k][j] -= q
        if Bn[k] >= (d - mu[k][k - 1] ** 2) * Bn[k - 1]:
            k += 1
        else:
            b[k - 1], b[k] = b[k], b[k - 1]
            U[k - 1], U[k] = U[k], U[k - 1]
            mu, Bn = _gso(b)
            k = max(k - 1, 1)
    if exact:
        M = np.array([[int(x) for x in row] for row in b], dtype=np.int64).T
    else:
        M = np.array(b, dtype=float).T
    Unew = np.array(U, dtype=np.int64).T
    if basis.transform is not None:
        Unew = basis.transform @ Unew
    return LatticeBasis(M, Unew)


def lll_conditions(basis: LatticeBasis, delta: float = 0.99, tol: float = 1e-9) -> bool:
    """Size reduction and Lovasz condition, checked from the Gram-Schmidt data."""
    exact = basis.is_integral
    b, _ = _to_rows(basis, exact)
    mu, Bn = _gso(b)
    n = len(b)
    half = Fraction(1, 2) if exact else 0.5 + tol
    if any(abs(mu[i][j]) > half for i in range(n) for j in range(i)):
        return False
    d = Fraction(delta).limit_denominator(10**6) if exact else delta - tol
    return all(Bn[k] >= (d - mu[k][k - 1] ** 2) * Bn[k - 1] for k in range(1, n))


class EllipsoidEnumerator:
    """Fincke-Pohst enumeration of ``{v in L : ||S^{-1}(v - c)||_2 <= rho}``.

    The triangular factor depends only on the basis and the shape ``S``, so
    one enumerator serves any number of centres.
    """

    def __init__(self, basis: LatticeBasis, shape, radius: float, node_cap: int = DEFAULT_NODE_CAP):
        self.basis = basis
        self.shape = np.asarray(shape, dtype=float)
        L = np.linalg.solve(self.shape, basis.matrix.astype(float))
        self._Q, R = np.linalg.qr(L)
        self._R = R.tolist()
        self._diag = [abs(R[i][i]) for i in range(basis.dim)]
        self.radius = float(radius)
        self.bound = self.radius ** 2 + BOUNDARY_SLACK * max(1.0, self.radius ** 2)
        self.node_cap = node_cap
        self.nodes = 0

    def coefficients(self, center=None) -> np.ndarray:
        C, nodes = self.search(center)
        self.nodes += nodes
        return C

    def search(self, center=None) -> tuple[np.ndarray, int]:
        """Sorted coefficient rows of the points near ``center`` and the node count."""
        n = self.basis.dim
        if center is None:
            y = [0.0] * n
        else:
            t = np.linalg.solve(self.shape, np.asarray(center, dtype=float))
            y = (self._Q.T @ t).tolist()
        R, bound, cap = self._R, self.bound, self.node_cap
        x = [0] * n
        out = []
        nodes = 0

        def rec(i, partial):
            nonlocal nodes
            acc = y[i]
            row = R[i]
            for j in range(i + 1, n):
                acc -= row[j] * x[j]
            rii = row[i]
            ci = acc / rii
            rem = bound - partial
            if rem < 0:
                return
            w = math.sqrt(rem) / self._diag[i]
            for v in range(math.ceil(ci - w), math.floor(ci + w) + 1):
                nodes += 1
                if nodes > cap:
                    raise CapExceededError(f"enumeration exceeded {cap} nodes", estimate=None)
                dlt = rii * v - acc
                p = partial + dlt * dlt
                if p > bound:
                    continue
                x[i] = v
                if i == 0:
                    out.append(tuple(x))
                else:
                    rec(i - 1, p)
            x[i] = 0

        rec(n - 1, 0.0)
        out.sort()
        return np.array(out, dtype=np.int64).reshape(-1, n), nodes


def enumerate_coefficients(basis: LatticeBasis, center, E, node_cap: int = DEFAULT_NODE_CAP) -> np.ndarray:
    return EllipsoidEnumerator(basis, E.shape, E.radius, node_cap).coefficients(center)


def enumerate_in_ellipsoid(basis: LatticeBasis, center, E, node_cap: int = DEFAULT_NODE_CAP) -> np.ndarray:
    """All lattice points in the closed ellipsoid ``center + E``, ordered by coefficient vector."""
    return basis.vectors(enumerate_coefficients(basis, center, E, node_cap))


def canonical_sign(c: np.ndarray) -> np.ndarray:
    """Flip ``c`` so that its first nonzero entry is positive."""
    nz = np.flatnonzero(c)
    return -c if len(nz) and c[nz[0]] < 0 else c


def tie_key(c) -> tuple:
    """Sort key for equal-norm vectors: smaller coefficient l1 size first, then
    the lexicographically largest sign-canonical coefficient vector."""
    c = canonical_sign(np.asarray(c))
    return (int(np.abs(c).sum()),) + tuple(-int(v) for v in c)


def squared_norms(basis: LatticeBasis, coefficients) -> np.ndarray:
    V = basis.vectors(coefficients)
    return (V * V).sum(axis=1)


def shortest_vector_l2_coefficients(basis: LatticeBasis, node_cap: int = DEFAULT_NODE_CAP) -> np.ndarray:
    """Coefficients (in ``basis``) of a shortest nonzero vector, deterministic tie-break."""
    red = lll_reduce(LatticeBasis(basis.matrix))
    cols = red.matrix.astype(float)
    radius = float(np.sqrt((cols * cols).sum(axis=0)).min())
    enum = EllipsoidEnumerator(red, np.eye(basis.dim), radius, node_cap)
    C = enum.coefficients() @ red.transform.T
    C = C[np.any(C != 0, axis=1)]
    sq = squared_norms(basis, C)
    best = sq.min()
    cands = [canonical_sign(c) for c in C[sq == best]]
    return min(cands, key=tie_key)


def shortest_vector_l2(basis: LatticeBasis, node_cap: int = DEFAULT_NODE_CAP) -> np.ndarray:
    return basis.vectors(shortest_vector_l2_coefficients(basis, node_cap)[None, :])[0]

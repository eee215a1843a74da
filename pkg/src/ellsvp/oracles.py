"""Brute-force reference computations over explicit coefficient boxes.

These routines share no search logic with the enumeration code: each derives
a box of integer coefficients from a bound on ``c = B^{-1} v`` (Cauchy-Schwarz
or the support function of the body) and tests every point in it.  They are
meant for small instances in tests and in the acceptance harness.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import linprog

from .bodies import ConvexBody, LpBall, SymPolytope
from .errors import CapExceededError
from .lattice import LatticeBasis
from .solver import Ellipsoid

DEFAULT_BOX_CAP = 20_000_000
_CHUNK = 1 << 18
SLACK = 1e-12


def _box(lo: np.ndarray, hi: np.ndarray, cap: int):
    """Yield chunks of all integer vectors with ``lo <= c <= hi``, lexicographic order."""
    lo = np.ceil(lo - 1e-9).astype(np.int64)
    hi = np.floor(hi + 1e-9).astype(np.int64)
    sizes = np.maximum(hi - lo + 1, 0)
    total = math.prod(int(k) for k in sizes)
    if total > cap:
        raise CapExceededError(f"oracle box holds {total} points > cap {cap}", estimate=float(total))
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        digits = np.empty((len(idx), len(sizes)), dtype=np.int64)
        for j in range(len(sizes) - 1, -1, -1):
            digits[:, j] = idx % sizes[j]
            idx //= sizes[j]
        yield digits + lo


def box_size(basis: LatticeBasis, radius: float, center=None) -> int:
    """Number of coefficient vectors the oracles would test for an l2 radius."""
    Binv = np.linalg.inv(basis.matrix.astype(float))
    w = np.sqrt((Binv * Binv).sum(axis=1)) * radius
    mid = np.zeros(basis.dim) if center is None else Binv @ np.asarray(center, dtype=float)
    lo, hi = np.ceil(mid - w - 1e-9), np.floor(mid + w + 1e-9)
    return math.prod(int(max(h - l + 1, 0)) for l, h in zip(lo, hi))


def brute_ellipsoid(basis: LatticeBasis, center, E: Ellipsoid, cap: int = DEFAULT_BOX_CAP) -> np.ndarray:
    """Lattice vectors in ``center + E``, sorted by coefficient vector."""
    n = basis.dim
    B = basis.matrix.astype(float)
    center = np.zeros(n) if center is None else np.asarray(center, dtype=float)
    M = np.linalg.inv(B) @ E.shape
    w = np.sqrt((M * M).sum(axis=1)) * E.radius
    mid = np.linalg.solve(B, center)
    Sinv = np.linalg.inv(E.shape)
    bound = E.radius ** 2 * (1 + SLACK)
    found = []
    for C in _box(mid - w, mid + w, cap):
        Y = (basis.vectors(C).astype(float) - center) @ Sinv.T
        found.append(C[(Y * Y).sum(axis=1) <= bound])
    C = np.vstack(found) if found else np.zeros((0, n), dtype=np.int64)
    return basis.vectors(C)


def brute_body(basis: LatticeBasis, body: ConvexBody, s: float, cap: int = DEFAULT_BOX_CAP) -> np.ndarray:
    """Lattice vectors with ``||v||_K <= s`` (same relative slack as the library), sorted."""
    n = basis.dim
    Binv = np.linalg.inv(basis.matrix.astype(float))
    w = np.sqrt((Binv * Binv).sum(axis=1)) * s * body.sandwich_R
    found = []
    for C in _box(-w, w, cap):
        V = basis.vectors(C)
        found.append(C[np.asarray(body.norm(V.astype(float))) <= s * (1 + SLACK)])
    C = np.vstack(found) if found else np.zeros((0, n), dtype=np.int64)
    return basis.vectors(C)


def support(body: ConvexBody, y) -> float:
    """``h_K(y) = max_{x in K} <y, x>``, so that ``|<y, v>| <= h_K(y) ||v||_K``.

    Closed form for l_p balls, a linear program for polytopes and the
    sandwich bound ``R ||y||_2`` otherwise.
    """
    y = np.asarray(y, dtype=float)
    if isinstance(body, LpBall):
        p = body.p
        q = 1.0 if math.isinf(p) else (math.inf if p == 1 else p / (p - 1))
        return body.radius * float(np.linalg.norm(y, q))
    if isinstance(body, SymPolytope):
        A = body.rows
        res = linprog(-y, A_ub=np.vstack([A, -A]), b_ub=np.ones(2 * len(A)),
                      bounds=[(None, None)] * len(y), method="highs")
        if res.status == 0:
            # pad for the solver's feasibility tolerance
            return -float(res.fun) * (1 + 1e-7) + 1e-9
    return body.sandwich_R * float(np.linalg.norm(y))


def _svp_halfwidths(basis: LatticeBasis, body: ConvexBody) -> np.ndarray:
    # any nonzero vector bounds the minimum; the short combinations are cheap
    small = next(_box(-np.ones(basis.dim), np.ones(basis.dim), 3 ** basis.dim))
    small = small[np.any(small != 0, axis=1)]
    mu = float(np.min(body.norm(basis.vectors(small).astype(float))))
    Binv = np.linalg.inv(basis.matrix.astype(float))
    return np.array([support(body, row) for row in Binv]) * mu


def brute_svp_norm(basis: LatticeBasis, body: ConvexBody, cap: int = DEFAULT_BOX_CAP) -> float:
    """``min ||v||_K`` over nonzero lattice vectors by exhaustive search.

    With ``mu`` the smallest norm among the coefficient vectors in
    ``{-1, 0, 1}^n``, any minimizer has ``||v||_K <= mu``, hence
    ``|c_i| = |<row_i(B^{-1}), v>| <= h_K(row_i(B^{-1})) mu``.
    """
    w = _svp_halfwidths(basis, body)
    best = math.inf
    for C in _box(-w, w, cap):
        C = C[np.any(C != 0, axis=1)]
        if len(C):
            best = min(best, float(np.min(body.norm(basis.vectors(C).astype(float)))))
    return best


def svp_box_size(basis: LatticeBasis, body: ConvexBody) -> int:
    w = np.floor(_svp_halfwidths(basis, body) + 1e-9)
    return math.prod(int(2 * k + 1) for k in w)

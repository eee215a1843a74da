"""Shortest vectors under an arbitrary symmetric norm.

The body is rounded once, an l-type ellipsoid ``E`` is computed for the
rounded body, and for a doubling sequence of scales ``s`` the set
``sK n L`` is enumerated by covering ``s R B2`` with translates of ``s E``
and running Euclidean enumeration inside each translate.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .bodies import ConvexBody, normalize
from .covering import DEFAULT_TRANSLATE_CAP, covering_translates
from .errors import CapExceededError, EllSvpError
from .grid import GridMode, GridParams, enumerate_grid
from .lattice import (
    DEFAULT_NODE_CAP,
    EllipsoidEnumerator,
    LatticeBasis,
    canonical_sign,
    lll_reduce,
    shortest_vector_l2_coefficients,
    tie_key,
)
from .solver import Ellipsoid, SolverConfig, SolveResult, build_ellipsoid, solve_ell_program

NORM_SLACK = 1e-12


@dataclass(frozen=True)
class SvpConfig:
    epsilon: float = 0.25
    max_iterations: int = 50_000
    mode: GridMode = GridMode.THEOREM_SET
    fallback_ball: bool = False
    translate_cap: int = DEFAULT_TRANSLATE_CAP
    node_cap: int = DEFAULT_NODE_CAP
    threads: int = 1
    max_rounds: int = 64


@dataclass(frozen=True, eq=False)
class PreparedBody:
    """A body in rounded position together with its ellipsoid."""

    body: ConvexBody
    rounded: ConvexBody
    T: np.ndarray
    ellipsoid: Ellipsoid
    solve: SolveResult | None


def prepare(body: ConvexBody, cfg: SvpConfig = SvpConfig()) -> PreparedBody:
    rounded, T = normalize(body)
    grid = enumerate_grid(GridParams.for_dim(body.dim, cfg.mode))
    res = solve_ell_program(rounded, grid, SolverConfig(cfg.epsilon, cfg.max_iterations, mode=cfg.mode))
    return PreparedBody(body, rounded, T, build_ellipsoid(res.A_opt, res.value, body.dim), res)


@dataclass
class EnumerationStats:
    translates: int = 0
    points_examined: int = 0
    nodes: int = 0


def _body_coefficients(basis: LatticeBasis, body: ConvexBody, s: float, E: Ellipsoid | None,
                       cfg: SvpConfig, stats: EnumerationStats) -> np.ndarray:
    """Coefficients of ``{v in L : ||v||_K <= s}`` (up to the norm slack), sorted."""
    n = basis.dim
    outer = s * body.sandwich_R
    if E is None:
        centres = np.zeros((1, n))
        enum = EllipsoidEnumerator(basis, np.eye(n), outer, cfg.node_cap)
    else:
        sE = E.scaled(s)
        centres = covering_translates(sE, outer, cfg.translate_cap)
        enum = EllipsoidEnumerator(basis, sE.shape, sE.radius, cfg.node_cap)

    def run(chunk):
        found, nodes = [], 0
        for c in chunk:
            C, k = enum.search(c)
            found.append(C)
            nodes += k
        return found, nodes

    if cfg.threads > 1 and len(centres) > 1:
        chunks = np.array_split(centres, cfg.threads)
        with ThreadPoolExecutor(cfg.threads) as pool:
            parts = list(pool.map(run, chunks))
    else:
        parts = [run(centres)]
    found = [c for part, _ in parts for c in part]
    stats.translates += len(centres)
    stats.nodes += sum(nodes for _, nodes in parts)
    if stats.nodes > cfg.node_cap:
        raise CapExceededError(f"enumeration exceeded {cfg.node_cap} nodes")
    C = np.vstack(found) if found else np.zeros((0, n), dtype=np.int64)
    stats.points_examined += len(C)
    if len(C) == 0:
        return C
    C = np.unique(C, axis=0)
    keep = np.asarray(body.norm(basis.vectors(C).astype(float))) <= s * (1 + NORM_SLACK)
    return C[keep]


def enumerate_in_body(basis: LatticeBasis, body: ConvexBody, s: float, E: Ellipsoid | None,
                      cfg: SvpConfig = SvpConfig()) -> np.ndarray:
    """Lattice points with ``||v||_K <= s``; ``E=None`` selects the single-ball path."""
    stats = EnumerationStats()
    return basis.vectors(_body_coefficients(basis, body, s, E, cfg, stats))


def points_in_body(basis: LatticeBasis, body: ConvexBody, s: float, cfg: SvpConfig = SvpConfig(),
                   prepared: PreparedBody | None = None) -> np.ndarray:
    """Lattice points with ``||v||_K <= s`` for a body in any position.

    The search runs in the rounded frame, where ``T B`` has the same
    coefficients as ``B``.
    """
    if cfg.fallback_ball:
        rounded, T = normalize(body)
        E = None
    else:
        prepared = prepared or prepare(body, cfg)
        rounded, T, E = prepared.rounded, prepared.T, prepared.ellipsoid
    mapped = LatticeBasis(T @ basis.matrix.astype(float))
    C = _body_coefficients(mapped, rounded, s, E, cfg, EnumerationStats())
    return basis.vectors(C)


@dataclass(frozen=True, eq=False)
class SvpResult:
    vector: np.ndarray
    coefficients: np.ndarray
    norm_value: float
    scale_used: float
    translates_enumerated: int
    points_examined: int
    rounds: int
    path: str
    bracket: tuple[float, float]
    extra: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "vector": self.vector.tolist(),
            "coefficients": self.coefficients.tolist(),
            "norm_value": self.norm_value,
            "scale_used": self.scale_used,
            "translates_enumerated": self.translates_enumerated,
            "points_examined": self.points_examined,
            "rounds": self.rounds,
            "path": self.path,
            "bracket": list(self.bracket),
            **self.extra,
        }


def svp(basis: LatticeBasis, body: ConvexBody, cfg: SvpConfig = SvpConfig(),
        prepared: PreparedBody | None = None) -> SvpResult:
    """Exact shortest nonzero lattice vector under ``||.||_K``.

    Scales are tried in the order ``s0, 2 s0, 4 s0, ...`` from the lower end of
    the bracket ``[lambda_2 / R', lambda_2 / r']`` until ``sK`` holds a nonzero
    lattice point; that set then contains every minimizer.
    """
    if basis.dim != body.dim:
        raise ValueError("basis and body dimensions differ")
    n = basis.dim
    if cfg.fallback_ball:
        rounded, T = normalize(body)
        E = None
    else:
        if prepared is None:
            prepared = prepare(body, cfg)
        rounded, T, E = prepared.rounded, prepared.T, prepared.ellipsoid

    # work in the rounded frame: ||T v||_{TK} = ||v||_K
    mapped = LatticeBasis(T @ basis.matrix.astype(float))
    red = lll_reduce(mapped)
    U = red.transform
    c2 = shortest_vector_l2_coefficients(red)
    v2 = red.vectors(c2[None, :])[0]
    lam2 = float(np.sqrt(v2 @ v2))
    lo, hi = lam2 / rounded.sandwich_R, lam2 / rounded.sandwich_r
    if not lo <= hi:
        raise EllSvpError(f"inverted bracket [{lo}, {hi}]: inconsistent sandwich radii")

    stats = EnumerationStats()
    s = lo
    rounds = 0
    while True:
        rounds += 1
        if rounds > cfg.max_rounds or s > 2 * hi * (1 + 1e-9):
            raise EllSvpError("scale search overran the bracket; body or sandwich radii inconsistent")
        C = _body_coefficients(red, rounded, s, E, cfg, stats)
        C = C[np.any(C != 0, axis=1)]
        if len(C):
            break
        s *= 2.0

    # coefficients with respect to the caller's basis
    C = C @ U.T
    norms = np.asarray(body.norm(basis.vectors(C).astype(float)))
    best = norms.min()
    cands = [canonical_sign(c) for c in C[norms == best]]
    coeffs = min(cands, key=tie_key)
    vec = basis.vectors(coeffs[None, :])[0]
    return SvpResult(
        vector=vec,
        coefficients=coeffs,
        norm_value=float(np.asarray(body.norm(vec[None, :].astype(float)))[0]),
        scale_used=s,
        translates_enumerated=stats.translates,
        points_examined=stats.points_examined,
        rounds=rounds,
        path="single_ball" if E is None else "ellipsoid_cover",
        bracket=(lo, hi),
    )


def count_nonzero_at_scale(basis: LatticeBasis, body: ConvexBody, s: float) -> int:
    """Number of nonzero lattice points with ``||v||_K <= s`` via the single-ball path."""
    rounded, T = normalize(body)
    mapped = LatticeBasis(T @ basis.matrix.astype(float))
    C = _body_coefficients(mapped, rounded, s, None, SvpConfig(), EnumerationStats())
    return int(np.any(C != 0, axis=1).sum())

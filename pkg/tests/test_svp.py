import functools
import itertools
import math

import numpy as np
import pytest

from ellsvp.acceptance import random_integer_basis, random_polytope
from ellsvp.bodies import LpBall, SymPolytope
from ellsvp.errors import CapExceededError
from ellsvp.lattice import LatticeBasis
from ellsvp.oracles import brute_body, brute_svp_norm, svp_box_size, support
from ellsvp.svp import (
    SvpConfig,
    count_nonzero_at_scale,
    enumerate_in_body,
    points_in_body,
    prepare,
    svp,
)
from ellsvp.solver import Ellipsoid


def rows(a):
    return sorted(map(tuple, np.asarray(a).tolist()))


@functools.lru_cache(maxsize=None)
def prepared(kind, n):
    body = {"L1": LpBall(n, 1.0), "L2": LpBall(n, 2.0), "Linf": LpBall(n, math.inf)}[kind]
    return prepare(body)


Z2 = LatticeBasis(np.eye(2, dtype=int))


# enumeration in a body ----------------------------------------------------

def test_cube_at_unit_scale():
    pts = enumerate_in_body(Z2, LpBall(2, math.inf), 1.0, Ellipsoid(np.eye(2), 1.0))
    assert rows(pts) == sorted(itertools.product([-1, 0, 1], repeat=2))


def test_cross_polytope_at_one_and_half():
    pts = points_in_body(Z2, LpBall(2, 1.0), 1.5, prepared=prepared("L1", 2))
    assert rows(pts) == [(-1, 0), (0, -1), (0, 0), (0, 1), (1, 0)]


@pytest.mark.parametrize("fallback", [False, True])
@pytest.mark.parametrize("seed", range(6))
def test_points_in_body_match_oracle(seed, fallback):
    rng = np.random.default_rng(seed)
    n = 2 + seed % 2
    body = random_polytope(rng, n)
    B = random_integer_basis(rng, n)
    s = float(rng.uniform(1.0, 4.0))
    cfg = SvpConfig(fallback_ball=fallback)
    got = points_in_body(B, body, s, cfg)
    assert rows(got) == rows(brute_body(B, body, s))


def test_oracle_box_on_tiny_case():
    # the body oracle itself, against a plain loop over a wide box
    B = LatticeBasis.from_columns([[2, 1], [1, -1]])
    body = LpBall(2, 1.0)
    want = sorted(tuple(v) for c in itertools.product(range(-8, 9), repeat=2)
                  if np.abs(v := B.vectors(np.array([c]))[0]).sum() <= 3)
    assert rows(brute_body(B, body, 3.0)) == want


def test_support_function_closed_forms():
    y = np.array([1.0, -2.0, 0.5])
    assert support(LpBall(3, 1.0), y) == pytest.approx(2.0)
    assert support(LpBall(3, math.inf), y) == pytest.approx(3.5)
    assert support(LpBall(3, 2.0, 2.0), y) == pytest.approx(2 * np.linalg.norm(y))
    assert support(SymPolytope(np.eye(3)), y) == pytest.approx(3.5, rel=1e-6)


# svp ----------------------------------------------------------------------

def test_z3_cube_returns_first_unit_vector():
    res = svp(LatticeBasis(np.eye(3, dtype=int)), LpBall(3, math.inf), prepared=prepared("Linf", 3))
    assert res.norm_value == 1.0
    assert res.vector.tolist() == [1, 0, 0]
    assert res.path == "ellipsoid_cover"


def test_two_by_two_l1_example():
    B = LatticeBasis.from_columns([[2, 0], [1, 2]])
    body = LpBall(2, 1.0)
    best = min(np.abs(B.vectors(np.array([c]))[0]).sum()
               for c in itertools.product(range(-5, 6), repeat=2) if any(c))
    res = svp(B, body, prepared=prepared("L1", 2))
    assert res.norm_value == best == 2.0
    assert res.vector.tolist() == [2, 0]


@pytest.mark.parametrize("seed", range(12))
def test_random_instances_match_oracle(seed):
    rng = np.random.default_rng(1000 + seed)
    n = 2 + seed % 3
    kind = ["L1", "L2", "Linf", "poly"][seed % 4]
    body = random_polytope(rng, n) if kind == "poly" else prepared(kind, n).body
    pre = None if kind == "poly" else prepared(kind, n)
    while True:
        B = random_integer_basis(rng, n)
        if svp_box_size(B, body) <= 200_000:
            break
    res = svp(B, body, prepared=pre)
    assert res.norm_value == brute_svp_norm(B, body)
    assert np.any(res.vector != 0)
    assert np.array_equal(B.vectors(res.coefficients[None, :])[0], res.vector)
    # scaling audit: a nonzero point at s, none at s/2
    s = res.scale_used
    assert count_nonzero_at_scale(B, body, s) > 0
    assert count_nonzero_at_scale(B, body, s / 2) == 0
    # superset audit: every minimizer is in the enumerated set
    minimizers = [v for v in brute_body(B, body, res.norm_value) if np.any(v)]
    found = set(rows(points_in_body(B, body, s, prepared=pre or prepare(body))))
    assert all(tuple(v) in found for v in np.asarray(minimizers).tolist())


@pytest.mark.parametrize("seed", range(4))
def test_symmetric_under_negated_basis(seed):
    rng = np.random.default_rng(50 + seed)
    n = 3
    body = LpBall(n, 1.0)
    B = random_integer_basis(rng, n)
    a = svp(B, body, prepared=prepared("L1", n))
    b = svp(LatticeBasis(-B.matrix), body, prepared=prepared("L1", n))
    assert a.norm_value == b.norm_value


def test_fallback_path_agrees():
    rng = np.random.default_rng(5)
    B = random_integer_basis(rng, 3)
    body = random_polytope(rng, 3)
    a = svp(B, body)
    b = svp(B, body, SvpConfig(fallback_ball=True))
    assert a.norm_value == b.norm_value
    assert np.array_equal(a.vector, b.vector)
    assert (a.path, b.path) == ("ellipsoid_cover", "single_ball")


def test_thread_count_does_not_change_output():
    rng = np.random.default_rng(9)
    B = random_integer_basis(rng, 3)
    body = random_polytope(rng, 3)
    pre = prepare(body)
    one = svp(B, body, SvpConfig(threads=1), prepared=pre).as_dict()
    four = svp(B, body, SvpConfig(threads=4), prepared=pre).as_dict()
    assert one == four


def test_result_invariants():
    rng = np.random.default_rng(2)
    B = random_integer_basis(rng, 2)
    res = svp(B, LpBall(2, 2.0), prepared=prepared("L2", 2))
    assert res.norm_value > 0
    assert LpBall(2, 2.0, res.norm_value * (1 + 1e-9)).contains(res.vector[None, :].astype(float))[0]
    lo, hi = res.bracket
    assert lo <= hi and res.rounds >= 1
    d = res.as_dict()
    assert {"vector", "norm_value", "scale_used", "translates_enumerated", "points_examined"} <= set(d)


def test_caps_propagate():
    B = LatticeBasis(np.eye(3, dtype=int))
    with pytest.raises(CapExceededError):
        svp(B, LpBall(3, math.inf), SvpConfig(node_cap=1), prepared=prepared("Linf", 3))


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        svp(Z2, LpBall(3, 2.0))

import functools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from ellsvp.bodies import (
    EllipsoidBody,
    LinearImage,
    LpBall,
    OracleBody,
    SymPolytope,
    inscribed_ellipsoid,
    is_normalized,
    membership,
    norm,
    normalize,
    subgradient,
)
from ellsvp.errors import OracleInconsistencyError, UnsupportedRoundingError

# subnormal magnitudes are excluded: squaring them underflows in any l2 reference
finite = st.floats(-50, 50).filter(lambda v: v == 0 or abs(v) > 1e-50)


def vec(n):
    return arrays(np.float64, n, elements=finite)


@functools.lru_cache(maxsize=None)
def analytic_bodies(n):
    rng = np.random.default_rng(n)
    return [
        LpBall(n, 1.0),
        LpBall(n, 2.0, 2.5),
        LpBall(n, 3.0),
        LpBall(n, math.inf, 0.5),
        SymPolytope(rng.standard_normal((n + 2, n))),
        EllipsoidBody(rng.standard_normal((n, n)) + 3 * np.eye(n)),
        LinearImage(rng.standard_normal((n, n)) + 2 * np.eye(n), LpBall(n, 1.0)),
    ]


# worked examples ------------------------------------------------------------

def test_norm_examples():
    assert norm(LpBall(2, math.inf), np.array([3.0, 4.0])) == 4.0
    assert norm(LpBall(2, 2.0), np.array([3.0, 4.0])) == 5.0


def test_oracle_wrapping_l1_ball():
    oracle = OracleBody(lambda x: np.abs(x).sum() <= 1.0, 3, 1 / math.sqrt(3), 1.0)
    assert abs(oracle.norm(np.ones(3)) - 3.0) <= 1e-8
    assert oracle.norm(np.zeros(3)) == 0.0


def test_oracle_inconsistent_radii():
    oracle = OracleBody(lambda x: np.abs(x).sum() <= 1.0, 2, 0.9, 1.0)
    with pytest.raises(OracleInconsistencyError):
        oracle.norm(np.array([1.0, 1.0]))


def test_oracle_rejects_loose_tolerance():
    with pytest.raises(ValueError):
        OracleBody(lambda x: True, 2, 1.0, 1.0, tolerance=1e-6)


def test_subgradient_examples():
    g = subgradient(LpBall(2, 1.0), np.array([2.0, -3.0]))
    assert g.tolist() == [1.0, -1.0] and g @ np.array([2.0, -3.0]) == 5.0
    g = subgradient(SymPolytope(np.eye(2)), np.array([0.5, 2.0]))
    assert g.tolist() == [0.0, 1.0]
    g = subgradient(EllipsoidBody(np.diag([2.0, 1.0])), np.array([2.0, 0.0]))
    assert np.allclose(g, [0.5, 0.0]) and math.isclose(g @ np.array([2.0, 0.0]), 1.0)


def test_membership_examples():
    ball = LpBall(2, 2.0)
    assert membership(ball, np.array([0.6, 0.8]))
    assert not membership(ball, np.array([0.7, 0.8]))
    assert membership(SymPolytope(np.array([[1.0, 1.0], [1.0, -1.0]])), np.array([0.9, 0.0]))


def test_polytope_rows_must_span():
    with pytest.raises(ValueError):
        SymPolytope(np.array([[1.0, 0.0], [2.0, 0.0]]))


def test_zero_vector_has_zero_norm():
    for body in analytic_bodies(3):
        assert float(body.norm(np.zeros(3))) == 0.0


# sandwich radii -------------------------------------------------------------

@pytest.mark.parametrize("n", [2, 3, 4])
def test_sandwich_radii_hold_on_random_directions(n):
    rng = np.random.default_rng(100 + n)
    U = rng.standard_normal((1000, n))
    U /= np.linalg.norm(U, axis=1, keepdims=True)
    for body in analytic_bodies(n):
        r, R = body.sandwich_r, body.sandwich_R
        assert 0 < r <= R
        assert np.all(body.contains(r * U * (1 - 1e-12)))
        assert not np.any(body.contains(R * U * (1 + 1e-6)))


def test_lp_sandwich_closed_forms():
    assert LpBall(4, 1.0).sandwich_r == pytest.approx(0.5)
    assert LpBall(4, 1.0).sandwich_R == 1.0
    assert LpBall(4, math.inf).sandwich_r == 1.0
    assert LpBall(4, math.inf).sandwich_R == pytest.approx(2.0)


# normalization --------------------------------------------------------------

def test_normalize_cube_is_identity():
    body = LpBall(3, math.inf)
    rounded, T = normalize(body)
    assert np.array_equal(T, np.eye(3))
    assert is_normalized(rounded)


def test_normalize_scaled_ball():
    rounded, T = normalize(LpBall(3, 2.0, 5.0))
    assert np.allclose(T, np.eye(3) / 5)
    assert rounded.sandwich_r == pytest.approx(1.0) and rounded.sandwich_R == pytest.approx(1.0)


def test_normalize_thin_box():
    body = SymPolytope(np.diag([1 / 10, 10.0]))
    rounded, T = normalize(body)
    assert np.allclose(np.abs(T), np.diag([1 / 10, 10.0]), rtol=1e-5)
    assert rounded.sandwich_R / rounded.sandwich_r == pytest.approx(math.sqrt(2), rel=1e-5)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_normalize_random_bodies(n):
    rng = np.random.default_rng(n)
    rows = rng.standard_normal((2 * n, n))
    rows[:, -1] *= 5
    bodies = [SymPolytope(rows),
              EllipsoidBody(np.diag(np.geomspace(0.01, 100, n))),
              LinearImage(np.diag(np.geomspace(0.1, 10, n)), LpBall(n, 1.0))]
    x = rng.standard_normal((50, n))
    for body in bodies:
        rounded, T = normalize(body)
        assert is_normalized(rounded, 1e-6)
        # the norm is transported exactly by T
        assert np.allclose(rounded.norm(x @ T.T), body.norm(x), rtol=1e-9)


def test_normalize_oracle_needs_good_radii():
    oracle = OracleBody(lambda x: np.abs(x).max() <= 1.0, 2, 0.1, 10.0)
    with pytest.raises(UnsupportedRoundingError):
        normalize(oracle)


def test_inscribed_ellipsoid_is_inside():
    rng = np.random.default_rng(7)
    rows = rng.standard_normal((8, 3))
    M = inscribed_ellipsoid(rows)
    assert np.sqrt(((rows @ M) ** 2).sum(axis=1)).max() <= 1 + 1e-12


# properties -----------------------------------------------------------------

@settings(max_examples=200, deadline=None)
@given(x=vec(3), c=st.floats(-1e3, 1e3).filter(lambda c: c == 0 or abs(c) > 1e-50))
def test_homogeneity_exact_for_analytic(x, c):
    for body in analytic_bodies(3):
        a = float(body.norm(c * x))
        b = abs(c) * float(body.norm(x))
        assert a == pytest.approx(b, rel=1e-12, abs=1e-250)


@settings(max_examples=200, deadline=None)
@given(x=vec(3), y=vec(3))
def test_triangle_and_symmetry(x, y):
    for body in analytic_bodies(3):
        assert float(body.norm(x + y)) <= float(body.norm(x)) + float(body.norm(y)) + 1e-9
        assert float(body.norm(-x)) == float(body.norm(x))


@settings(max_examples=200, deadline=None)
@given(x=vec(3))
def test_norm_sandwich_consistency(x):
    e = float(np.linalg.norm(x))
    for body in analytic_bodies(3):
        v = float(body.norm(x))
        assert e / body.sandwich_R * (1 - 1e-9) <= v <= e / body.sandwich_r * (1 + 1e-9)


@pytest.mark.parametrize("body", analytic_bodies(3), ids=lambda b: b.kind)
def test_subgradient_support_property(body):
    rng = np.random.default_rng(11)
    X = rng.standard_normal((1000, 3))
    Y = rng.standard_normal((1000, 3))
    G = body.subgradient(X)
    assert np.allclose((G * X).sum(axis=1), body.norm(X), rtol=1e-9)
    assert np.all((G * Y).sum(axis=1) <= body.norm(Y) * (1 + 1e-9) + 1e-12)


def test_oracle_subgradient_matches_analytic():
    ball = LpBall(3, 2.0)
    oracle = OracleBody(lambda x: float(x @ x) <= 1.0, 3, 1.0, 1.0)
    x = np.array([0.3, -1.2, 2.0])
    assert np.allclose(oracle.subgradient(x), ball.subgradient(x), atol=1e-4)


def test_linear_image_identity():
    rng = np.random.default_rng(5)
    T = rng.standard_normal((3, 3)) + 2 * np.eye(3)
    inner = SymPolytope(rng.standard_normal((5, 3)))
    img = LinearImage(T, inner)
    X = rng.standard_normal((100, 3))
    assert np.allclose(img.norm(X), inner.norm(np.linalg.solve(T, X.T).T), rtol=1e-9)


def test_norms_are_batch_independent():
    rng = np.random.default_rng(1)
    X = rng.standard_normal((257, 4))
    for body in analytic_bodies(4):
        whole = body.norm(X)
        assert all(whole[i] == body.norm(X[i:i + 1])[0] for i in range(0, 257, 16))

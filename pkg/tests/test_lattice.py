import itertools
import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from ellsvp.errors import CapExceededError
from ellsvp.lattice import (
    LatticeBasis,
    canonical_sign,
    enumerate_in_ellipsoid,
    gram_determinant,
    lll_conditions,
    lll_reduce,
    shortest_vector_l2,
    shortest_vector_l2_coefficients,
    tie_key,
)
from ellsvp.oracles import brute_ellipsoid
from ellsvp.solver import Ellipsoid


def random_basis(rng, n, entry=5):
    while True:
        B = rng.integers(-entry, entry + 1, size=(n, n))
        if round(np.linalg.det(B)) != 0:
            return LatticeBasis(B)


def exhaustive_shortest(basis, k):
    best, arg = math.inf, []
    for c in itertools.product(range(-k, k + 1), repeat=basis.dim):
        if not any(c):
            continue
        v = basis.vectors(np.array([c]))[0]
        q = int(v @ v) if basis.is_integral else float(v @ v)
        if q < best:
            best, arg = q, [c]
        elif q == best:
            arg.append(c)
    return best, arg


# bases ---------------------------------------------------------------------

def test_basis_validation():
    with pytest.raises(ValueError):
        LatticeBasis(np.array([[1, 2], [2, 4]]))
    with pytest.raises(ValueError):
        LatticeBasis(np.ones((2, 3)))
    B = LatticeBasis.from_columns([[2, 0], [1, 2]])
    assert B.is_integral and B.matrix.tolist() == [[2, 1], [0, 2]]


def test_float_basis_stays_float():
    B = LatticeBasis(np.array([[1.5, 0.0], [0.0, 2.0]]))
    assert not B.is_integral
    assert gram_determinant(B) == pytest.approx(9.0)


# LLL -----------------------------------------------------------------------

def test_lll_identity_unchanged():
    red = lll_reduce(LatticeBasis(np.eye(3, dtype=int)))
    assert red.matrix.tolist() == np.eye(3, dtype=int).tolist()


def test_lll_skewed_example():
    red = lll_reduce(LatticeBasis.from_columns([[1000, 0], [999, 1]]))
    first = red.columns[0]
    assert sorted(map(abs, first.tolist())) == [1, 1]
    assert first @ first == 2
    best, arg = exhaustive_shortest(LatticeBasis.from_columns([[1000, 0], [999, 1]]), 3)
    assert best == 2


def test_lll_rejects_bad_delta():
    with pytest.raises(ValueError):
        lll_reduce(LatticeBasis(np.eye(2, dtype=int)), 0.2)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_lll_conditions_and_exact_invariance(n):
    rng = np.random.default_rng(n)
    for _ in range(10):
        B = random_basis(rng, n, 20)
        red = lll_reduce(B)
        assert lll_conditions(red)
        assert gram_determinant(red) == gram_determinant(B)  # exact Fractions
        U = red.transform
        assert round(abs(np.linalg.det(U))) == 1
        assert np.array_equal(B.matrix @ U, red.matrix)


def test_lll_float_basis_invariance():
    rng = np.random.default_rng(3)
    B = LatticeBasis(rng.standard_normal((4, 4)) * 10)
    red = lll_reduce(B)
    assert lll_conditions(red)
    assert gram_determinant(red) == pytest.approx(gram_determinant(B), rel=1e-9)
    assert np.allclose(B.matrix @ red.transform, red.matrix)


# enumeration ---------------------------------------------------------------

Z2 = LatticeBasis(np.eye(2, dtype=int))


def test_enumerate_disk_radius_one_and_half():
    pts = enumerate_in_ellipsoid(Z2, np.zeros(2), Ellipsoid(np.eye(2), 1.5))
    assert sorted(map(tuple, pts.tolist())) == sorted(itertools.product([-1, 0, 1], repeat=2))


def test_enumerate_shifted_center():
    pts = enumerate_in_ellipsoid(Z2, np.array([0.5, 0.0]), Ellipsoid(np.eye(2), 0.6))
    assert pts.tolist() == [[0, 0], [1, 0]]


def test_enumerate_includes_boundary():
    pts = enumerate_in_ellipsoid(Z2, np.zeros(2), Ellipsoid(np.eye(2), 1.0))
    assert len(pts) == 5


def test_enumerate_node_cap():
    with pytest.raises(CapExceededError):
        enumerate_in_ellipsoid(Z2, np.zeros(2), Ellipsoid(np.eye(2), 30.0), node_cap=100)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 4))
def test_enumeration_matches_brute_force(seed, n):
    rng = np.random.default_rng(seed)
    B = random_basis(rng, n, 4)
    M = rng.standard_normal((n, n)) + 2 * np.eye(n)
    E = Ellipsoid(M, float(rng.uniform(0.5, 3.0)))
    c = rng.standard_normal(n) * 2
    try:
        want = brute_ellipsoid(B, c, E, cap=2_000_000)
    except CapExceededError:
        assume(False)  # ill-conditioned draw: the oracle box is too large to scan
    got = enumerate_in_ellipsoid(B, c, E)
    assert sorted(map(tuple, got.tolist())) == sorted(map(tuple, want.tolist()))


def test_brute_force_oracle_on_tiny_case():
    # the oracle itself, checked against a plain loop
    B = LatticeBasis.from_columns([[2, 1], [0, 3]])
    E = Ellipsoid(np.diag([2.0, 1.0]), 2.0)
    want = []
    for c in itertools.product(range(-10, 11), repeat=2):
        v = B.vectors(np.array([c]))[0]
        if (v[0] / 2) ** 2 + v[1] ** 2 <= 4:
            want.append(tuple(v))
    assert sorted(map(tuple, brute_ellipsoid(B, None, E).tolist())) == sorted(want)


# l2 shortest vectors -------------------------------------------------------

@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_zn_returns_first_unit_vector(n):
    v = shortest_vector_l2(LatticeBasis(np.eye(n, dtype=int)))
    assert v.tolist() == np.eye(n, dtype=int)[0].tolist()


def test_two_by_two_example():
    B = LatticeBasis.from_columns([[2, 0], [1, 2]])
    best, _ = exhaustive_shortest(B, 3)
    v = shortest_vector_l2(B)
    assert v @ v == best == 4
    assert v.tolist() == [2, 0]


def test_scaled_lattice():
    rng = np.random.default_rng(12)
    B = random_basis(rng, 3)
    v = shortest_vector_l2(B)
    v3 = shortest_vector_l2(LatticeBasis(3 * B.matrix))
    assert np.array_equal(v3, 3 * v)


@pytest.mark.parametrize("seed", range(20))
def test_shortest_matches_exhaustive(seed):
    rng = np.random.default_rng(100 + seed)
    n = 2 + seed % 3
    B = random_basis(rng, n, 4)
    red = lll_reduce(B)
    c = shortest_vector_l2_coefficients(B)
    v = B.vectors(c[None, :])[0]
    # an LLL basis bounds the coefficients of short vectors; search the reduced basis
    best, _ = exhaustive_shortest(red, 3)
    assert v @ v == best
    assert all(v @ v <= col @ col for col in red.columns)
    assert tuple(c) == tuple(canonical_sign(c))


def test_tie_key_orders_small_coefficients_first():
    cands = [np.array([1, 1]), np.array([0, 1]), np.array([1, 0]), np.array([1, -1])]
    assert min(cands, key=tie_key).tolist() == [1, 0]
    assert canonical_sign(np.array([0, -2, 1])).tolist() == [0, 2, -1]

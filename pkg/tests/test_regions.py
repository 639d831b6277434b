import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from fwkit import Box, KSparse, L1Ball, L2Ball, Simplex, box_dual_prices, region_from_dict
from fwkit.exceptions import ContractViolation, UnsupportedRegionError
from fwkit.regions import diameter, lmo, membership


def test_simplex_lmo_picks_smallest():
    np.testing.assert_array_equal(lmo(Simplex(3), [3.0, 1.0, 2.0]), [0, 1, 0])


def test_simplex_lmo_tie_breaks_lowest_index():
    n = 10
    c = np.zeros(n)
    c[0] = 2.0
    expected = np.zeros(n)
    expected[1] = 1.0
    np.testing.assert_array_equal(lmo(Simplex(n), c), expected)


def test_box_lmo_sign_rule():
    np.testing.assert_array_equal(lmo(Box(3, 0, 1), [-1.0, 2.0, 0.0]), [1, 0, 0])


def test_zero_cost_gives_first_vertex():
    np.testing.assert_array_equal(lmo(Simplex(3), np.zeros(3)), [1, 0, 0])
    np.testing.assert_array_equal(lmo(Box(2, -1, 1), np.zeros(2)), [-1, -1])
    np.testing.assert_array_equal(lmo(KSparse(4, 2, 1.0), np.zeros(4)), [-1, -1, 0, 0])
    np.testing.assert_array_equal(lmo(L1Ball(3, 2.0), np.zeros(3)), [-2, 0, 0])
    np.testing.assert_array_equal(lmo(L2Ball(3, 2.0), np.zeros(3)), [-2, 0, 0])


def test_l1_and_l2_closed_forms():
    np.testing.assert_array_equal(lmo(L1Ball(3, 2.0), [0.5, -3.0, 1.0]), [0, 2, 0])
    np.testing.assert_allclose(lmo(L2Ball(2, 5.0), [3.0, 4.0]), [-3.0, -4.0])


def test_lmo_dimension_mismatch():
    with pytest.raises(ContractViolation):
        lmo(Simplex(3), [1.0, 2.0])


@pytest.mark.parametrize("region, x, expected", [
    (Simplex(3), [0.2, 0.3, 0.5], True),
    (Simplex(3), [0.5, 0.6, -0.1], False),
    (KSparse(4, 2, 1.0), [1.0, 1.0, 0.0, 0.0], True),
    (KSparse(4, 2, 1.0), [1.0, 1.0, 0.5, 0.0], False),
    (Box(2, 0, 1), [1.0, 1.0 + 1e-12], True),
    (L2Ball(2, 1.0), [0.8, 0.8], False),
])
def test_membership_examples(region, x, expected):
    assert membership(region, x, 1e-9) is expected


def test_membership_wrong_shape_is_false():
    assert not membership(Simplex(3), [0.5, 0.5], 1e-9)


@pytest.mark.parametrize("region, expected", [
    (Simplex(10), math.sqrt(2)),
    (Box(4, 0, 1), 2.0),
    (L2Ball(7, 3.0), 6.0),
    (L1Ball(3, 1.5), 3.0),
    (KSparse(10, 4, 0.5), 2.0),
])
def test_diameter_examples(region, expected):
    assert diameter(region) == pytest.approx(expected, rel=1e-15)


@pytest.mark.parametrize("region", [Simplex(4), Box(3, -1, 2), KSparse(5, 2, 1.0), L1Ball(3, 2.0)])
def test_diameter_matches_vertex_enumeration(region):
    V = region.vertices()
    brute = max(np.linalg.norm(a - b) for a, b in itertools.combinations(V, 2))
    assert region.diameter() == pytest.approx(brute, rel=1e-12)


def test_lmo_returns_feasible_vertex(region, rng):
    for _ in range(100):
        c = rng.standard_normal(region.dim)
        v = region.lmo(c)
        tol = 1e-12 if region.kind == "l2ball" else 0.0
        assert region.contains(v, tol)
        if region.kind != "l2ball":
            assert any(np.array_equal(v, u) for u in region.vertices())
        else:
            assert np.linalg.norm(v) == pytest.approx(region.r)


def test_lmo_optimality(region, rng):
    xs = region.sample(rng, 100)
    assert all(region.contains(x, 1e-9) for x in xs)
    for _ in range(100):
        c = rng.standard_normal(region.dim)
        v = region.lmo(c)
        assert np.all(c @ v <= xs @ c + 1e-12)


@pytest.mark.parametrize("n, K", [(n, K) for n in range(1, 9) for K in range(1, min(n, 3) + 1)])
def test_ksparse_lmo_matches_brute_force(n, K, rng):
    region = KSparse(n, K, 0.7)
    for _ in range(20):
        c = rng.standard_normal(n)
        best = math.inf
        for support in itertools.combinations(range(n), K):
            for signs in itertools.product((-1, 1), repeat=K):
                val = 0.7 * sum(s * c[i] for s, i in zip(signs, support))
                best = min(best, val)
        assert c @ region.lmo(c) == pytest.approx(best, abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(arrays(np.float64, 6, elements=st.floats(-1e3, 1e3)))
def test_lmo_never_beaten_by_a_vertex(c):
    for region in (Simplex(6), Box(6, -2, 1), KSparse(6, 3, 1.0), L1Ball(6, 1.0)):
        V = region.vertices()
        assert c @ region.lmo(c) <= (V @ c).min() + 1e-9


def test_box_dual_prices_example():
    prices = box_dual_prices(Box(2, 0, 1), [-1.0, 2.0])
    np.testing.assert_array_equal(prices.lam, [1, 0, 0, 2])
    x = np.array([0.5, 0.5])
    assert prices.complementarity_gap(x) == pytest.approx(1.5)
    v = lmo(Box(2, 0, 1), [-1.0, 2.0])
    np.testing.assert_array_equal(v, [1, 0])
    assert np.array([-1.0, 2.0]) @ (x - v) == pytest.approx(1.5)


def test_box_dual_prices_stationary():
    prices = box_dual_prices(Box(2, 0, 1), [0.0, 0.0])
    assert not prices.lam.any()


def test_box_dual_prices_identity_random(rng):
    region = Box(3, 0, 1)
    for _ in range(100):
        g = rng.standard_normal(3)
        x = rng.uniform(0, 1, 3)
        prices = box_dual_prices(region, g)
        v = region.lmo(g)
        assert np.all(prices.lam >= 0)
        np.testing.assert_allclose(-prices.lam @ prices.A, g, atol=1e-12)
        assert g @ v == pytest.approx(-prices.lam @ prices.b, abs=1e-12)
        assert abs(g @ (x - v) - prices.complementarity_gap(x)) <= 1e-10


def test_dual_prices_need_box():
    with pytest.raises(UnsupportedRegionError):
        box_dual_prices(Simplex(3), [1.0, 2.0, 3.0])


@pytest.mark.parametrize("d", [
    {"kind": "simplex", "n": 4},
    {"kind": "box", "n": 3, "lo": -1, "hi": 2},
    {"kind": "ksparse", "n": 5, "K": 2, "tau": 1.0},
    {"kind": "l1ball", "n": 3, "r": 2.0},
    {"kind": "l2ball", "n": 3, "r": 2.0},
])
def test_region_round_trip(d):
    region = region_from_dict(d)
    assert region_from_dict(region.to_dict()) == region


def test_bad_region_descriptors():
    with pytest.raises(ContractViolation):
        region_from_dict({"kind": "torus", "n": 3})
    with pytest.raises(ContractViolation):
        region_from_dict({"kind": "ksparse", "n": 3, "K": 5})
    with pytest.raises(ContractViolation):
        Box(2, 1.0, 0.0)

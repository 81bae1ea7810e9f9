import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ggtlab import sol
from ggtlab.errors import HypothesisViolation, ValidationError

CAT = [[2, 1], [1, 1]]
coord = st.floats(-40, 40, allow_nan=False)


def test_lower_bound_examples():
    assert sol.sol_lower_bound((0, 0, 0), (1, 1, 0)) == 0.0
    assert sol.sol_lower_bound((0, 0, 0), (0.3, -0.2, 0)) == 0.0
    assert abs(sol.sol_lower_bound((0, 0, 0), (8, 0, 0)) - 2 * math.log(8)) < 1e-12
    assert abs(sol.sol_lower_bound((0, 0, 0), (8, 0, 0)) - 4.1589) < 1e-4
    with pytest.raises(ValidationError):
        sol.sol_lower_bound((0, 0, 1), (8, 0, 0))


@given(coord, coord, coord, coord)
def test_lower_bound_symmetric(a, b, c, d):
    assert sol.sol_lower_bound((a, b, 0), (c, d, 0)) == sol.sol_lower_bound((c, d, 0), (a, b, 0))


def test_upper_bound_trivial_cases():
    assert sol.sol_distance_upper((1, 2, 3), (1, 2, 3)) == 0.0
    assert sol.sol_distance_upper((0, 0, 0), (0, 0, 2.5)) == 2.5
    with pytest.raises(ValidationError):
        sol.sol_distance_upper((0, 0, 0), (1, 0, 0), segments=0)


def test_upper_bound_axis_point():
    up = sol.sol_distance_upper((0, 0, 0), (8, 0, 0))
    assert up >= sol.sol_lower_bound((0, 0, 0), (8, 0, 0))
    # descend to z = -log 4, cross, climb back: 2 log 4 + 8/4
    assert abs(up - (2 * math.log(4) + 2)) < 1e-6
    # the straight path at z = 0 has length 8
    assert up < 8


def test_staircase_length_closed_form():
    # one leg at height h: 2|h| + sqrt(e^{2h} X^2 + e^{-2h} Y^2)
    X, Y, h = 3.0, 5.0, -0.4
    L = sol.staircase_length(X, Y, 0.0, [h], [1.0], [1.0])
    assert abs(L - (2 * abs(h) + math.sqrt(math.exp(2 * h) * X * X + math.exp(-2 * h) * Y * Y))) < 1e-12


@settings(max_examples=60, deadline=None)
@given(coord, coord, coord, coord)
def test_lower_below_upper(a, b, c, d):
    lo = sol.sol_lower_bound((a, b, 0), (c, d, 0))
    up = sol.sol_distance_upper((a, b, 0), (c, d, 0))
    assert lo <= up + 1e-9


@settings(max_examples=40, deadline=None)
@given(coord, coord, st.floats(-3, 3), coord, coord, st.floats(-3, 3))
def test_upper_bound_left_invariant(a, b, c, x, y, z):
    g = sol.SolPoint(1.5, -2.0, 0.7)
    p, q = sol.SolPoint(a, b, c), sol.SolPoint(x, y, z)
    u1 = sol.sol_distance_upper(p, q)
    u2 = sol.sol_distance_upper(g * p, g * q)
    assert abs(u1 - u2) < 1e-6 * (1 + u1)


def test_group_law_inverse():
    p = sol.SolPoint(2.0, -1.0, 0.5)
    e = p * p.inverse()
    assert max(abs(c) for c in e) < 1e-12


def test_embedding_examples():
    emb = sol.sol_embedding(CAT)
    assert np.allclose(emb.f @ emb.v_minus, [1, 0], atol=1e-9)
    assert np.allclose(emb.f @ emb.v_plus, [0, 1], atol=1e-9)
    lam = (3 + math.sqrt(5)) / 2
    assert abs(emb.log_lambda - math.log(lam)) < 1e-12
    assert sol.sol_embed(0, 0, 0, CAT) == sol.SolPoint(0.0, 0.0, 0.0)
    t = sol.sol_embed(0, 0, 1, CAT)
    assert t.x == 0 and t.y == 0 and abs(t.z - math.log(lam)) < 1e-12


def test_embedding_of_lattice_points():
    emb = sol.sol_embedding(CAT)
    for k in (-3, 1, 5):
        p = sol.sol_embed(k, 0, 0, emb)
        # solve f^-1 (x, y) = (k, 0) by hand with the eigenbasis
        B = np.column_stack([emb.v_minus, emb.v_plus])
        assert np.allclose(B @ [p.x, p.y], [k, 0], atol=1e-9)
        assert p.z == 0


def test_embedding_intertwines_phi():
    # phi acts on f-coordinates as diag(1/lambda, lambda)
    emb = sol.sol_embedding(CAT)
    lam = math.exp(emb.log_lambda)
    v = np.array([3.0, -7.0])
    w = np.array(CAT, dtype=float) @ v
    assert np.allclose(emb.f @ w, [emb.f[0] @ v / lam, emb.f[1] @ v * lam], atol=1e-9)


def test_embedding_rejects_bad_matrices():
    with pytest.raises(HypothesisViolation):
        sol.sol_embedding([[1, 0], [0, 1]])
    with pytest.raises(HypothesisViolation):
        sol.sol_embedding([[-2, 1], [1, -1]])
    with pytest.raises(HypothesisViolation):
        sol.sol_embedding([[2, 1, 0], [1, 1, 0], [0, 0, 1]])


def test_distortion_direct_evaluations():
    # (0,0) and (3,4): 5 <= sqrt2 * 4
    assert 5 <= math.sqrt(2) * 4
    rep = sol.distortion_check(CAT, samples=60, seed=1)
    assert rep.euclid_vs_max_violations == 0
    assert rep.lower_bound_violations == 0
    assert rep.sol_corrected_violations == 0
    assert rep.log_form_corrected_violations == 0
    # the log form with log(1/sqrt 2) fails on every sample
    assert rep.log_form_printed_violations == rep.samples
    assert abs(rep.axis_printed_bound - (2 * math.log(8) + math.log(2))) < 1e-12
    # a concrete path beats 2 log 8 + log 2, so that bound cannot hold
    assert rep.axis_upper < rep.axis_printed_bound
    assert rep.axis_upper >= 2 * math.log(8) - math.log(2)


def test_distortion_fit_positive():
    rep = sol.distortion_check(CAT, samples=200, seed=0)
    assert rep.fit_pairs == 200
    assert rep.fit_C > 0


def test_distortion_deterministic():
    a = sol.distortion_check(CAT, samples=30, seed=5)
    b = sol.distortion_check(CAT, samples=30, seed=5)
    assert a == b

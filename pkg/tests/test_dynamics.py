import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ggtlab import dynamics as dy
from ggtlab import intlinalg as il
from ggtlab.errors import HypothesisViolation, ValidationError

CAT = [[2, 1], [1, 1]]


def unimodular(draw_ops, n):
    rows = il.identity(n)
    for i, j, c in draw_ops:
        if i % n == j % n:
            continue
        i, j = i % n, j % n
        rows = [list(r) for r in rows]
        for k in range(n):
            rows[i][k] += c * rows[j][k]
    return rows


ops = st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(-2, 2)),
               min_size=1, max_size=6)


# -- automorphisms -------------------------------------------------------------

def test_parse_and_inverse():
    M = dy.IntAutomorphism("2,1; 1,1")
    assert M.rows == ((2, 1), (1, 1))
    assert M.inverse_rows == ((1, -1), (-1, 2))
    assert il.mat_mul(M.rows, M.inverse_rows) == il.identity(2)
    assert M.to_text() == "2,1;1,1"


@pytest.mark.parametrize("text", ["2,0;0,1", "1,2,3", "", "a,b;c,d"])
def test_bad_matrices(text):
    with pytest.raises(ValidationError):
        dy.IntAutomorphism(text)


# -- spectrum ------------------------------------------------------------------

def test_identity_spectrum():
    s = dy.spectrum([[1, 0], [0, 1]])
    assert s.multiplicity_total == 2
    assert all(abs(r.value - 1) <= r.radius for r in s.roots)
    assert abs(s.spectral_radius - 1) < 1e-12


def test_cat_map_spectrum():
    s = dy.spectrum(CAT)
    vals = sorted(r.value.real for r in s.roots)
    assert s.charpoly == (1, -3, 1)
    # quadratic formula on x^2 - 3x + 1
    expected = [(3 - math.sqrt(5)) / 2, (3 + math.sqrt(5)) / 2]
    for v, e, r in zip(vals, expected, sorted(s.roots, key=lambda r: r.value.real)):
        assert abs(v - e) <= r.radius + 1e-15
        assert r.radius < 1e-12
    assert abs(s.spectral_radius - 2.618033988749895) < 1e-12


def test_reciprocal_pair_spectrum():
    # eigenvalues 2 - sqrt 3 and 2 + sqrt 3, reciprocal to each other
    s = dy.spectrum([[3, 2], [1, 1]])
    lo, hi = sorted(abs(r.value) for r in s.roots)
    assert abs(lo * hi - 1) < 1e-12
    assert 0 < lo < 1 < hi


@settings(max_examples=60, deadline=None)
@given(ops, st.integers(2, 4))
def test_spectrum_invariants(draw_ops, n):
    s = dy.spectrum(unimodular(draw_ops, n))
    assert s.multiplicity_total == n
    prod = 1.0
    for r in s.roots:
        prod *= abs(r.value) ** r.multiplicity
    assert abs(prod - 1) < 1e-8
    nonreal = [r.value for r in s.roots if abs(r.value.imag) > r.radius]
    for v in nonreal:
        assert any(abs(w - v.conjugate()) < 1e-9 for w in nonreal)


# -- hyperbolicity -------------------------------------------------------------

def test_hyperbolic_examples():
    assert not dy.is_hyperbolic([[1, 0], [0, 1]])
    assert dy.is_hyperbolic(CAT)
    assert dy.is_hyperbolic([[3, 2], [1, 1]])
    assert not dy.is_hyperbolic([[0, -1], [1, 0]])        # rotation by a quarter turn
    assert not dy.is_hyperbolic([[1, 1], [0, 1]])         # shear
    assert not dy.is_hyperbolic([[0, -1], [1, 1]])        # order 6


def test_unit_circle_non_root_of_unity():
    # companion matrix of the Salem-type quartic x^4 - x^3 - x^2 - x + 1:
    # two roots on the unit circle that are not roots of unity
    C = [[0, 0, 0, -1], [1, 0, 0, 1], [0, 1, 0, 1], [0, 0, 1, 1]]
    assert not dy.is_hyperbolic(C)
    f = dy.spectrum(C).factors[0]
    assert f.n_unit == 2


@settings(max_examples=60, deadline=None)
@given(ops, st.integers(2, 4))
def test_hyperbolic_matches_float_oracle(draw_ops, n):
    rows = unimodular(draw_ops, n)
    w = np.linalg.eigvals(np.array(rows, dtype=float))
    gap = np.min(np.abs(np.abs(w) - 1))
    if gap > 1e-6:
        assert dy.is_hyperbolic(rows)
    if not dy.is_hyperbolic(rows):
        # exact answer says some root is on the circle; floats must agree loosely
        assert gap < 1e-6


# -- splitting -----------------------------------------------------------------

def test_splitting_hyperbolic():
    s = dy.spectral_splitting(CAT)
    assert s.dims() == (1, 1, 0)
    assert s.residuals["minus"] < 1e-9 and s.residuals["plus"] < 1e-9


def test_splitting_identity():
    s = dy.spectral_splitting([[1, 0], [0, 1]])
    assert s.dims() == (0, 0, 2)
    assert s.exact_zero and s.residuals["zero"] == 0.0


def test_splitting_block_diagonal_exact_zero_part():
    s = dy.spectral_splitting([[2, 1, 0], [1, 1, 0], [0, 0, 1]])
    assert s.dims() == (1, 1, 1)
    assert s.exact_zero
    assert il.rank(s.basis_zero + [(0, 0, 1)]) == 1


def test_splitting_rational_eigenlines():
    # eigenvalues -1 and 1 with eigenvectors (1,-1) and (1,0)
    s = dy.spectral_splitting([[1, 2], [0, -1]])
    assert s.dims() == (0, 0, 2)


@settings(max_examples=40, deadline=None)
@given(ops, st.integers(2, 4))
def test_splitting_dimensions_and_invariance(draw_ops, n):
    s = dy.spectral_splitting(unimodular(draw_ops, n))
    assert sum(s.dims()) == n
    for name in ("minus", "plus", "zero"):
        exact = getattr(s, f"exact_{name}")
        assert s.residuals[name] == 0.0 if exact else s.residuals[name] < 1e-9


# -- adapted norm --------------------------------------------------------------

def test_adapted_norm_diagonalizable():
    n = dy.adapted_norm(dy.IntAutomorphism(CAT), 0.01)
    assert abs(n.certified_bound - n.spectral_radius) < 1e-9


def test_adapted_norm_jordan_block():
    J = [[Fraction(1, 2), Fraction(1)], [Fraction(0), Fraction(1, 2)]]
    n = dy.adapted_norm(J, 0.1)
    assert n.certified_bound <= 0.6
    # direct operator norm in the scaled basis
    B = n.basis_change
    A = np.array([[0.5, 1.0], [0.0, 0.5]])
    assert np.linalg.norm(B @ A @ np.linalg.inv(B), 2) <= n.certified_bound + 1e-12


def test_adapted_norm_rejects_bad_delta():
    with pytest.raises(ValidationError):
        dy.adapted_norm(dy.IntAutomorphism(CAT), 0)


@settings(max_examples=25, deadline=None)
@given(ops, st.integers(2, 4), st.sampled_from([0.05, 0.2, 1.0]))
def test_adapted_norm_random_unit_vectors(draw_ops, n, delta):
    M = dy.IntAutomorphism(unimodular(draw_ops, n))
    res = dy.adapted_norm(M, delta)
    B = res.basis_change
    C = B @ M.as_float() @ np.linalg.inv(B)
    v = np.random.default_rng(0).normal(size=(n, 10 ** 4))
    v /= np.linalg.norm(v, axis=0)
    assert np.linalg.norm(C @ v, axis=0).max() < res.spectral_radius + delta


# -- orbits --------------------------------------------------------------------

def test_orbit_basics():
    assert set(dy.orbit((0, 0), CAT, -3, 3).points) == {(0, 0)}
    assert dy.orbit((1, 0), CAT, 0, 1).at(1) == (2, 1)
    with pytest.raises(ValidationError):
        dy.orbit((1, 0), CAT, 1, 3)


@given(st.tuples(st.integers(-9, 9), st.integers(-9, 9)), st.integers(0, 6))
def test_orbit_inverse_reverses(z, k):
    fwd = dy.orbit(z, CAT, -k, k)
    back = dy.orbit(z, dy.IntAutomorphism(CAT).inverse(), -k, k)
    assert fwd.points == tuple(reversed(back.points))
    for i in range(-k, k):
        assert fwd.at(i + 1) == il.mat_vec(CAT, fwd.at(i))


# -- orbit intersections -------------------------------------------------------

def brute_intersections(z, w, a, window):
    M = np.array(CAT, dtype=object)
    Minv = np.array([[1, -1], [-1, 2]], dtype=object)

    def it(v, k):
        v = np.array(v, dtype=object)
        P = M if k >= 0 else Minv
        for _ in range(abs(k)):
            v = P.dot(v)
        return tuple(int(x) for x in v)

    A = {i: it(z, i) for i in range(-window, window + 1)}
    B = {j: tuple(x + y for x, y in zip(a, it(w, j))) for j in range(-window, window + 1)}
    return sorted((i, j) for i in A for j in B if A[i] == B[j])


def test_intersection_precondition():
    with pytest.raises(HypothesisViolation):
        dy.orbit_intersection_count((1, 0), (1, 0), (0, 0), CAT, 10)
    with pytest.raises(HypothesisViolation):
        dy.orbit_intersection_count((1, 0), (2, 1), (1, 0), [[1, 1], [0, 1]], 5)


def test_intersection_example():
    res = dy.orbit_intersection_count((1, 0), (1, 0), (0, 1), CAT, 30)
    assert res.count <= 2
    assert sorted(res.pairs) == brute_intersections((1, 0), (1, 0), (0, 1), 30)
    for i, j in res.pairs:
        assert dy.orbit((1, 0), CAT, -30, 30).at(i) == tuple(
            x + y for x, y in zip((0, 1), dy.orbit((1, 0), CAT, -30, 30).at(j)))
    assert res.certified


def test_intersection_two_solutions():
    # z = phi(a) + w with w = a gives (1, 0); and (0, -1) by rearranging
    a = (1, 1)
    z = tuple(x + y for x, y in zip(il.mat_vec(CAT, a), a))
    res = dy.orbit_intersection_count(z, a, a, CAT, 12)
    assert res.pairs == brute_intersections(z, a, a, 12)
    assert res.count >= 1 and res.total_count <= 2


vec = st.tuples(st.integers(-20, 20), st.integers(-20, 20)).filter(any)


@settings(max_examples=150, deadline=None)
@given(vec, vec, vec)
def test_intersection_matches_brute_force(z, w, a):
    res = dy.orbit_intersection_count(z, w, a, CAT, 15)
    assert sorted(res.pairs) == brute_intersections(z, w, a, 15)
    assert res.total_count <= 2
    if res.certified:
        assert res.count == res.total_count


# -- packing bound and separated pairs -----------------------------------------

def test_packing_bound_examples():
    assert dy.packing_bound_estimate(1, CAT) == 50
    assert dy.packing_bound_estimate(0.5, CAT) == 2
    assert len(dy.lattice_ball(2, 2)) == 13


@given(st.floats(0, 8), st.floats(0, 8))
def test_packing_bound_monotone(d1, d2):
    lo, hi = sorted((d1, d2))
    assert dy.packing_bound_estimate(lo, CAT) <= dy.packing_bound_estimate(hi, CAT)


@given(st.integers(0, 6), st.integers(1, 3))
def test_lattice_ball_count(D, n):
    import itertools
    oracle = sum(1 for v in itertools.product(range(-D, D + 1), repeat=n)
                 if sum(x * x for x in v) <= D * D)
    assert len(dy.lattice_ball(D, n)) == oracle


def test_separated_pair_examples():
    res = dy.separated_pair([(0, 0), (10 ** 6, 0)], 10, CAT)
    assert res.pair == (0, 1) and res.certified
    assert dy.separated_pair([(0, 0), (1, 0)], 10, CAT).pair is None


def test_separated_pair_result_is_separated():
    rng = np.random.default_rng(3)
    pts = sorted({tuple(int(x) for x in rng.integers(-100, 101, size=2)) for _ in range(30)})
    res = dy.separated_pair(pts, 5, CAT)
    i, j = res.pair
    v = tuple(x - y for x, y in zip(pts[i], pts[j]))
    o = dy.orbit(v, CAT, -res.window - 20, res.window + 20)
    assert all(sum(x * x for x in p) > 25 for p in o.points)


def test_separated_pair_rejects_duplicates():
    with pytest.raises(ValidationError):
        dy.separated_pair([(1, 1), (1, 1)], 2, CAT)


def test_certified_window_growth():
    # every nonzero |v| <= 50 leaves the 5-ball beyond the certified window
    cert = dy.certified_window(CAT, 5, radius=50)
    for v in dy.lattice_ball(50, 2)[::7]:
        if not any(v):
            continue
        o = dy.orbit(v, CAT, -cert.window - 12, cert.window + 12)
        for k in range(cert.window + 1, cert.window + 13):
            for kk in (k, -k):
                assert sum(x * x for x in o.at(kk)) > 25


# -- invariant lattice ---------------------------------------------------------

def test_invariant_lattice_examples():
    assert dy.invariant_lattice(CAT) == [(1, 0), (0, 1)]
    assert dy.invariant_lattice([[1, 0], [0, 1]]) == []
    assert dy.invariant_lattice([[2, 1, 0], [1, 1, 0], [0, 0, 1]]) == [(1, 0, 0), (0, 1, 0)]


def test_invariant_lattice_is_saturated_and_stable():
    # cat map glued to a unipotent block through an off-diagonal coupling
    M = [[2, 1, 1], [1, 1, 0], [0, 0, 1]]
    L = dy.invariant_lattice(M)
    assert len(L) == 2
    for b in L:
        assert il.in_lattice(il.mat_vec(M, b), L)
    # saturation: a vector in the real span with integer entries is in the lattice
    assert il.saturation(L, 3) == il.hermite_rows(L)


def test_invariant_lattice_rejects_negative_spectrum():
    with pytest.raises(HypothesisViolation):
        dy.invariant_lattice([[-2, 1], [1, -1]])

import math
from fractions import Fraction

from hypothesis import given, settings, strategies as st

from ggtlab import tree as tr
from ggtlab.groups import FreeWord, ProdElement

W = FreeWord.parse
half = Fraction(1, 2)

letters = st.lists(st.sampled_from([1, -1, 2, -2]), max_size=7)
words = letters.map(FreeWord)


@st.composite
def tree_points(draw):
    w = draw(words)
    if draw(st.booleans()):
        x = draw(st.sampled_from([1, -1, 2, -2]))
        return tr.tree_point(w, x, Fraction(draw(st.integers(1, 7)), 8))
    return tr.tree_point(w)


@st.composite
def product_points(draw):
    vec = tuple(Fraction(draw(st.integers(-40, 40)), 4) for _ in range(2))
    return tr.ProductPoint(draw(tree_points()), vec)


def test_tree_distance_examples():
    assert tr.tree_distance(tr.tree_point("ab"), tr.tree_point("ac")) == 2
    for w in ["", "a", "abAB", "bbb"]:
        assert tr.tree_distance(tr.tree_point(""), tr.tree_point(w)) == len(W(w))
    g = tr.TreeGeodesic(tr.tree_point(""), tr.tree_point("aa"))
    assert g.point_at(1) == tr.tree_point("a")
    assert g.length == 2


def test_tree_point_canonical_form():
    # (a, A, 1/4) is the point 3/4 of the way from e to a
    p = tr.tree_point("a", -1, Fraction(1, 4))
    assert p == tr.TreePoint(FreeWord(), 1, Fraction(3, 4))
    assert tr.tree_point("b", 1, 0) == tr.TreePoint(W("b"), 0, Fraction(0))
    assert tr.tree_point("b", 1, 1) == tr.tree_point("ba")


def test_tree_distance_on_same_edge_and_across():
    p = tr.tree_point("", 1, Fraction(1, 4))
    q = tr.tree_point("", 1, Fraction(3, 4))
    assert tr.tree_distance(p, q) == half
    r = tr.tree_point("", 2, Fraction(1, 4))
    assert tr.tree_distance(p, r) == half
    s = tr.tree_point("ab", -1, Fraction(1, 2))
    # from 1/4 along e-a to a, then b, then half an edge
    assert tr.tree_distance(p, s) == Fraction(3, 4) + 1 + half


def test_product_distance_examples():
    P = tr.product_point("", (0, 0))
    Q = tr.product_point("a", (3, 4))
    assert tr.product_distance_sq(P, Q) == 26
    assert abs(tr.GeodesicPath(P, Q).length - math.sqrt(26)) < 1e-15
    R = tr.product_point("", (6, 8))
    mid = tr.GeodesicPath(P, R).point_at(half)
    assert mid == tr.product_point("", (3, 4))


def test_product_geodesic_proportional_parametrization():
    P = tr.product_point("", (0, 0))
    Q = tr.product_point("aa", (2, 0))
    assert tr.GeodesicPath(P, Q).point_at(half) == tr.product_point("a", (1, 0))


@settings(max_examples=150)
@given(tree_points(), tree_points(), tree_points())
def test_tree_distance_metric(p, q, r):
    d = tr.tree_distance
    assert d(p, q) == d(q, p)
    assert (d(p, q) == 0) == (p == q)
    assert d(p, r) <= d(p, q) + d(q, r)


@settings(max_examples=150)
@given(product_points(), product_points(), st.integers(0, 16))
def test_geodesic_endpoints_and_splitting(P, Q, k):
    g = tr.GeodesicPath(P, Q)
    assert g.point_at(0) == P
    assert g.point_at(1) == Q
    assert g.length_sq == tr.product_distance_sq(P, Q)
    tau = Fraction(k, 16)
    X = g.point_at(tau)
    # exact splitting of the length along the geodesic
    assert tr.product_distance_sq(P, X) == tau ** 2 * g.length_sq
    assert tr.product_distance_sq(X, Q) == (1 - tau) ** 2 * g.length_sq


@settings(max_examples=100)
@given(tree_points(), tree_points())
def test_geodesic_pieces_cover_length(p, q):
    g = tr.TreeGeodesic(p, q)
    assert sum(hi - lo for _, _, lo, hi in g.pieces()) == g.length


@settings(max_examples=80)
@given(st.lists(tree_points(), min_size=1, max_size=6), st.integers(0, 8))
def test_spanned_subtree_contains_geodesics(pts, k):
    sub = tr.Subtree.spanned(pts)
    for p in pts:
        assert p in sub
        for q in pts:
            g = tr.TreeGeodesic(p, q)
            assert g.point_at(g.length * Fraction(k, 8)) in sub


def test_subtree_excludes_outside_points():
    sub = tr.Subtree.spanned([tr.tree_point(""), tr.tree_point("ab")])
    assert tr.tree_point("a") in sub
    assert tr.tree_point("b") not in sub
    assert tr.tree_point("a", 2, half) in sub
    assert tr.tree_point("", 2, half) not in sub
    assert [e["base"] for e in sub.edge_list()] == ["e", "a"]


@given(words, st.tuples(st.integers(-5, 5), st.integers(-5, 5)), product_points(), product_points())
def test_group_acts_by_isometries(w, z, P, Q):
    g = ProdElement(w, z)
    assert tr.product_distance_sq(tr.act(g, P), tr.act(g, Q)) == tr.product_distance_sq(P, Q)

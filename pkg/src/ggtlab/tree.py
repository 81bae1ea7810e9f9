"""Points and geodesics in T_{2m} x R^n with unit tree edges.

T_{2m} is the Cayley graph of F_m.  A tree point is either a vertex (a
reduced word) or a point at rational offset on an edge.  Edges are stored
pointing away from the identity vertex, so (w, s, theta) always has
|w s| = |w| + 1 and 0 < theta < 1; the other description of the same point,
(w s, s^-1, 1 - theta), is normalized to this one on construction.

All coordinates are Fractions, so points sampled at rational parameters on
geodesics are exact.
"""

import math
from fractions import Fraction
from typing import NamedTuple

from .groups import FreeWord

ZERO = Fraction(0)


class TreePoint(NamedTuple):
    base: FreeWord
    edge: int
    offset: Fraction

    @property
    def is_vertex(self):
        return self.edge == 0

    def __str__(self):
        if self.is_vertex:
            return str(self.base)
        return f"{self.base}+{self.offset}*{FreeWord((self.edge,))}"


def tree_point(base, edge=0, offset=0):
    base = base if isinstance(base, FreeWord) else FreeWord.parse(base) if isinstance(
        base, str) else FreeWord(base)
    offset = Fraction(offset)
    if edge == 0 or offset == 0:
        return TreePoint(base, 0, ZERO)
    if not 0 <= offset <= 1:
        raise ValueError("offset must lie in [0, 1]")
    if offset == 1:
        return TreePoint(base * FreeWord((edge,)), 0, ZERO)
    if base and base[-1] == -edge:
        return TreePoint(base * FreeWord((edge,)), -edge, 1 - offset)
    return TreePoint(base, edge, offset)


def word_distance(u, v):
    return len(u.inverse() * v)


def _ends(p):
    """(vertex, distance from p) for the endpoints of p's edge."""
    if p.is_vertex:
        return [(p.base, ZERO)]
    return [(p.base, p.offset), (p.base * FreeWord((p.edge,)), 1 - p.offset)]


def tree_distance(p, q):
    if not p.is_vertex and not q.is_vertex and (p.base, p.edge) == (q.base, q.edge):
        return abs(p.offset - q.offset)
    return min(dp + word_distance(a, b) + dq for a, dp in _ends(p) for b, dq in _ends(q))


class TreeGeodesic:
    """Unit-speed geodesic between two tree points, parametrized by arc length."""

    def __init__(self, p, q):
        self.start, self.end = p, q
        if not p.is_vertex and not q.is_vertex and (p.base, p.edge) == (q.base, q.edge):
            self.same_edge = True
            self.length = abs(p.offset - q.offset)
            return
        self.same_edge = False
        best = None
        for a, dp in _ends(p):
            for b, dq in _ends(q):
                tot = dp + word_distance(a, b) + dq
                if best is None or tot < best[0]:
                    best = (tot, a, dp, b, dq)
        self.length, self.a, self.da, self.b, self.db = best
        self.path = tuple(self.a.inverse() * self.b)

    def point_at(self, s):
        """Point at arc length s (0 <= s <= length)."""
        s = Fraction(s)
        p, q = self.start, self.end
        if self.same_edge:
            step = s if q.offset > p.offset else -s
            return tree_point(p.base, p.edge, p.offset + step)
        if s <= self.da:
            if p.is_vertex:
                return p
            # leaving p's edge through a
            off = p.offset - s if self.a == p.base else p.offset + s
            return tree_point(p.base, p.edge, off)
        s -= self.da
        if s <= len(self.path):
            k = int(s)
            frac = s - k
            v = self.a * FreeWord(self.path[:k])
            if frac == 0:
                return tree_point(v)
            return tree_point(v, self.path[k], frac)
        s -= len(self.path)
        if q.is_vertex:
            return q
        off = s if self.b == q.base else 1 - s
        return tree_point(q.base, q.edge, off)

    def pieces(self):
        """Edge intervals covered, as (base, letter, lo, hi) in canonical orientation."""
        out = []
        p, q = self.start, self.end
        if self.same_edge:
            lo, hi = sorted((p.offset, q.offset))
            if hi > lo:
                out.append((p.base, p.edge, lo, hi))
            return out
        if not p.is_vertex:
            if self.a == p.base:
                out.append((p.base, p.edge, ZERO, p.offset))
            else:
                out.append((p.base, p.edge, p.offset, Fraction(1)))
        v = self.a
        for x in self.path:
            w = v * FreeWord((x,))
            if len(w) > len(v):
                out.append((v, x, ZERO, Fraction(1)))
            else:
                out.append((w, -x, ZERO, Fraction(1)))
            v = w
        if not q.is_vertex:
            if self.b == q.base:
                out.append((q.base, q.edge, ZERO, q.offset))
            else:
                out.append((q.base, q.edge, q.offset, Fraction(1)))
        return out


class ProductPoint(NamedTuple):
    tree: TreePoint
    vec: tuple

    def __str__(self):
        return f"({self.tree}, ({','.join(str(x) for x in self.vec)}))"


def product_point(tree, vec=()):
    t = tree if isinstance(tree, TreePoint) else tree_point(tree)
    return ProductPoint(t, tuple(Fraction(x) for x in vec))


def act(g, x):
    """Action of ProdElement g on a product point: left translation in the
    tree and translation in R^n."""
    tp = x.tree
    base = g.word * tp.base
    t = tree_point(base, tp.edge, tp.offset) if not tp.is_vertex else TreePoint(base, 0, ZERO)
    return ProductPoint(t, tuple(a + b for a, b in zip(x.vec, g.z)))


def orbit_point(g, n=None):
    return ProductPoint(TreePoint(g.word, 0, ZERO), tuple(Fraction(x) for x in g.z))


def euclid_sq(u, v):
    return sum((a - b) ** 2 for a, b in zip(u, v))


def product_distance_sq(P, Q):
    """Exact squared distance (a Fraction)."""
    return tree_distance(P.tree, Q.tree) ** 2 + euclid_sq(P.vec, Q.vec)


def product_distance(P, Q):
    return math.sqrt(product_distance_sq(P, Q))


class GeodesicPath:
    def __init__(self, P, Q):
        self.start, self.end = P, Q
        self.tree = TreeGeodesic(P.tree, Q.tree)
        self.tree_length = self.tree.length
        self.length_sq = self.tree_length ** 2 + euclid_sq(P.vec, Q.vec)

    @property
    def length(self):
        return math.sqrt(self.length_sq)

    def point_at(self, tau):
        """Point at parameter tau in [0, 1]; both factors move proportionally."""
        tau = Fraction(tau)
        if not 0 <= tau <= 1:
            raise ValueError("tau must lie in [0, 1]")
        t = self.tree.point_at(tau * self.tree_length)
        vec = tuple((1 - tau) * a + tau * b for a, b in zip(self.start.vec, self.end.vec))
        return ProductPoint(t, vec)

    def samples(self, m):
        return [self.point_at(Fraction(k, m - 1)) for k in range(m)]


def product_geodesic(P, Q):
    return GeodesicPath(P, Q)


def tree_geodesic(p, q):
    return TreeGeodesic(p, q)


class Subtree:
    """A connected union of closed edge intervals and vertices of T_{2m}."""

    def __init__(self):
        self.vertices = set()
        self.edges = {}   # (base, letter) -> (lo, hi)

    @classmethod
    def spanned(cls, points):
        pts = list(points)
        st = cls()
        if not pts:
            return st
        root = pts[0]
        st._add_point(root)
        for p in pts[1:]:
            g = TreeGeodesic(root, p)
            for base, x, lo, hi in g.pieces():
                st._add_interval(base, x, lo, hi)
            st._add_point(p)
        return st

    def _add_point(self, p):
        if p.is_vertex:
            self.vertices.add(p.base)
        else:
            self._add_interval(p.base, p.edge, p.offset, p.offset)

    def _add_interval(self, base, x, lo, hi):
        key = (base, x)
        if key in self.edges:
            a, b = self.edges[key]
            lo, hi = min(a, lo), max(b, hi)
        self.edges[key] = (lo, hi)
        if lo == 0:
            self.vertices.add(base)
        if hi == 1:
            self.vertices.add(base * FreeWord((x,)))

    def __contains__(self, p):
        if p.is_vertex:
            return p.base in self.vertices
        iv = self.edges.get((p.base, p.edge))
        return iv is not None and iv[0] <= p.offset <= iv[1]

    def edge_list(self):
        out = []
        for (base, x), (lo, hi) in sorted(self.edges.items(),
                                           key=lambda kv: (len(kv[0][0]), kv[0][0], kv[0][1])):
            out.append({"base": str(base), "letter": str(FreeWord((x,))),
                        "from": str(lo), "to": str(hi)})
        return out

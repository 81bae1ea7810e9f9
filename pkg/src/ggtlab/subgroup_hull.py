"""Orbit hulls of subgroups H of F_m x Z^n acting on T_{2m} x R^n.

H acts on the product by left translation in the tree and translation in
R^n.  The orbit of x0 = (w0, v0) fibres over tree vertices: above the vertex
u w0 sits the coset z_u + v0 + A, where A = H n ({e} x Z^n) is the lattice of
pure translations.  ``FibredOrbit`` stores one representative per vertex and
a lattice found by a breadth-first search over words, which lets
nearest-orbit queries see whole fibres instead of a truncated ball.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import numpy as np

from . import groups as gr
from .errors import BudgetExceeded, HypothesisViolation, ValidationError
from .intlinalg import hermite_rows, in_span, lattice_coordinates, lattice_reduce, rref
from .tree import (GeodesicPath, ProductPoint, Subtree, TreePoint, _ends, product_point,
                   tree_point)

DEFAULT_SAMPLES = 32
FreeWord = gr.FreeWord


def _check_group(G):
    if not isinstance(G, gr.FreeTimesAbelian):
        raise ValidationError("hull tools need a group of the form F_m x Z^n")


def _gens(G, H_generators):
    _check_group(G)
    gens = [G.parse_element(g) if isinstance(g, str) else g for g in H_generators]
    for g in gens:
        if len(g.z) != G.n or any(abs(x) > G.m for x in g.word):
            raise ValidationError(f"generator {g} does not belong to {G.descriptor}")
    return gens


def _basepoint(G, x0):
    if x0 is None:
        return product_point(FreeWord(), (0,) * G.n)
    if not x0.tree.is_vertex:
        raise ValidationError("the basepoint must sit at a tree vertex")
    if len(x0.vec) != G.n:
        raise ValidationError("basepoint vector has the wrong length")
    return x0


def orbit_points(G, elements, x0=None):
    x0 = _basepoint(G, x0)
    return [ProductPoint(TreePoint(h.word * x0.tree.base, 0, Fraction(0)),
                         tuple(Fraction(a) + b for a, b in zip(h.z, x0.vec)))
            for h in elements]


def point_key(P):
    t = P.tree
    return (len(t.base), tuple(t.base), t.edge, t.offset, P.vec)


def _lll(rows):
    # sympy's exact LLL, for a short basis in fibre distance searches
    from sympy import ZZ
    from sympy.polys.matrices import DomainMatrix
    if len(rows) <= 1:
        return [tuple(r) for r in rows]
    M = DomainMatrix([[ZZ(int(x)) for x in r] for r in rows], (len(rows), len(rows[0])), ZZ)
    return [tuple(int(x) for x in r) for r in M.lll().to_list()]


class FibredOrbit:
    """Orbit of x0 under H, one lattice fibre per tree vertex.

    The search visits words of H-length at most ``depth`` in the quotient
    H / A.  Whenever two paths reach the same word their Euclidean parts
    differ by a pure translation of H, which is added to the lattice.
    """

    def __init__(self, G, H_generators, depth, x0=None, extra_translations=()):
        _check_group(G)
        gens = gr._symmetrize(G, _gens(G, H_generators))
        self.G, self.depth = G, depth
        self.x0 = _basepoint(G, x0)
        origin = FreeWord()
        reps = {origin: (0,) * G.n}
        level = {origin: 0}
        diffs = {tuple(t) for t in extra_translations if any(t)}
        frontier = [origin]
        for d in range(1, depth + 1):
            nxt = []
            for u in frontier:
                z = reps[u]
                for g in gens:
                    w = gr.free_mul(u, g.word)
                    z2 = tuple(a + b for a, b in zip(z, g.z))
                    if w in reps:
                        diff = tuple(a - b for a, b in zip(z2, reps[w]))
                        if any(diff):
                            diffs.add(diff)
                    else:
                        reps[w] = z2
                        level[w] = d
                        nxt.append(w)
            frontier = nxt
        self.lattice = hermite_rows(sorted(diffs)) if diffs else []
        self.level = level
        if self.lattice:
            reps = {u: tuple(lattice_reduce(z, self.lattice)) for u, z in reps.items()}
        self.reps = reps
        base = self.x0.tree.base
        v0 = [float(x) for x in self.x0.vec]
        self.by_vertex = {}
        prefixes = self.prefixes = set()
        for u, z in reps.items():
            w = u * base if base else u
            self.by_vertex[w] = tuple(float(a) + b for a, b in zip(z, v0))
            for k in range(len(w), -1, -1):
                p = FreeWord._raw(w[:k]) if k < len(w) else w
                if p in prefixes:
                    break
                prefixes.add(p)
        self._short = _lll(self.lattice)
        if self._short:
            B = np.array(self._short, dtype=float)
            self._pinv = np.linalg.pinv(B.T)
        else:
            self._pinv = None

    def words(self, max_level=None):
        if max_level is None:
            return list(self.reps)
        return [u for u, d in self.level.items() if d <= max_level]

    def fibre_distance_sq(self, v, z):
        diff = [a - b for a, b in zip(v, z)]
        if not self._short:
            return sum(x * x for x in diff)
        c = self._pinv @ np.array(diff)
        base = [math.floor(x) for x in c]
        best = math.inf
        for shift in product((-1, 0, 1, 2), repeat=len(base)):
            cc = [b + s for b, s in zip(base, shift)]
            r = list(diff)
            for k, vec in zip(cc, self._short):
                if k:
                    for i, x in enumerate(vec):
                        r[i] -= k * x
            best = min(best, sum(x * x for x in r))
        return best

    def nearest(self, P):
        """Distance from P to the nearest point of the stored orbit."""
        ends = _ends(P.tree)
        if P.tree.is_vertex:
            frontier = [(ends[0][0], 0.0, None)]
        else:
            e = P.tree.edge
            frontier = [(ends[0][0], float(ends[0][1]), e), (ends[1][0], float(ends[1][1]), -e)]
        return self._walk(frontier, [float(x) for x in P.vec])

    def _walk(self, frontier, v):
        # breadth-first walk outward from the point's edge, pruned by the best distance
        best = math.inf
        m = self.G.m
        seen = set()
        while frontier:
            nxt = []
            for u, d, banned in frontier:
                if d >= best or u in seen:
                    continue
                seen.add(u)
                z = self.by_vertex.get(u)
                if z is not None:
                    best = min(best, math.sqrt(d * d + self.fibre_distance_sq(v, z)))
                for x in range(-m, m + 1):
                    if x == 0 or x == banned or (u and u[-1] == -x):
                        continue
                    w = FreeWord._raw(u + (x,))
                    if w in self.prefixes:
                        nxt.append((w, d + 1, -x))
                if u and -u[-1] != banned:
                    nxt.append((FreeWord._raw(u[:-1]), d + 1, u[-1]))
            frontier = nxt
        return best


# ---------------------------------------------------------------------------
# sampled iterated hulls

def _vertex_samples(P, Q, m):
    # same points as GeodesicPath.point_at(k / (m - 1)), with integer bookkeeping
    a, b = P.tree.base, Q.tree.base
    path = tuple(a.inverse() * b)
    L, q = len(path), m - 1
    out = []
    dv = [y - x for x, y in zip(P.vec, Q.vec)]
    for k in range(m):
        i, r = divmod(k * L, q)
        v = a * FreeWord._raw(path[:i]) if i else a
        t = TreePoint(v, 0, Fraction(0)) if r == 0 else tree_point(v, path[i], Fraction(r, q))
        out.append(ProductPoint(t, tuple(x + d * k / q for x, d in zip(P.vec, dv))))
    return out


def _geodesic_samples(P, Q, m):
    if P.tree.is_vertex and Q.tree.is_vertex:
        return _vertex_samples(P, Q, m)
    g = GeodesicPath(P, Q)
    return [g.point_at(Fraction(k, m - 1)) for k in range(m)]


def conv_step(points, samples_per_pair=DEFAULT_SAMPLES, max_pairs=None, seed=0, budget=None):
    """Points plus evenly parametrized samples on every pairwise geodesic.

    With ``max_pairs`` only a seeded random subset of the pairs is used.
    Raises BudgetExceeded with the points gathered so far when the output
    would exceed ``budget`` points.
    """
    if samples_per_pair < 2:
        raise ValidationError("samples_per_pair must be at least 2")
    pts = sorted(set(points), key=point_key)
    pairs = [(i, j) for i in range(len(pts)) for j in range(i + 1, len(pts))]
    if max_pairs is not None and len(pairs) > max_pairs:
        rng = np.random.default_rng(seed)
        pick = np.sort(rng.choice(len(pairs), size=max_pairs, replace=False))
        pairs = [pairs[k] for k in pick]
    out = set(pts)
    for i, j in pairs:
        out.update(_geodesic_samples(pts[i], pts[j], samples_per_pair))
        if budget is not None and len(out) > budget:
            raise BudgetExceeded(f"more than {budget} points", partial=sorted(out, key=point_key))
    return sorted(out, key=point_key)


@dataclass
class QuasiconvexityReport:
    table: dict                 # R -> nu_hat(R)
    samples: int
    pairs: dict                 # R -> number of geodesics sampled
    witnesses: dict             # R -> (far endpoint, worst point) as strings
    margin: int
    seed: int


def quasiconvexity_estimate(G, H_generators, R, samples=DEFAULT_SAMPLES, x0=None,
                            max_pairs=None, seed=0, margin=3):
    """nu_hat(R): how far geodesics between orbit points stray from the orbit.

    Geodesics run from x0 to h x0 for h in the H-ball of radius R (every pair
    of orbit points is an H-translate of such a pair).  Distances are taken
    to the fibred orbit of depth R + margin, so truncation of the orbit does
    not inflate the estimate near the boundary.
    """
    radii = [R] if isinstance(R, int) else sorted(R)
    if any(r < 1 for r in radii):
        raise ValidationError("R must be at least 1")
    gens = _gens(G, H_generators)
    x0 = _basepoint(G, x0)
    table, npairs, wit = {}, {}, {}
    for r in radii:
        ball = gr.word_metric_ball(G, r, gens)
        orbit = FibredOrbit(G, gens, r + margin, x0)
        hs = sorted((h for h in ball.dist if h != G.identity), key=G.sort_key)
        if max_pairs is not None and len(hs) > max_pairs:
            rng = np.random.default_rng(seed)
            hs = [hs[k] for k in np.sort(rng.choice(len(hs), size=max_pairs, replace=False))]
        cache = {}
        worst, where = 0.0, None
        a = x0.tree.base
        v0 = [float(x) for x in x0.vec]
        q = samples - 1
        for h in hs:
            path = tuple(h.word)
            L = len(path)
            for k in range(samples):
                i, rem = divmod(k * L, q)
                key = (path[:i], path[i] if rem else 0, rem, tuple(k * c for c in h.z))
                d = cache.get(key)
                if d is None:
                    u = a * FreeWord._raw(path[:i])
                    if rem:
                        x, t = path[i], rem / q
                        frontier = [(u, t, x), (u * FreeWord._raw((x,)), 1 - t, -x)]
                    else:
                        frontier = [(u, 0.0, None)]
                    v = [b + k * c / q for b, c in zip(v0, h.z)]
                    d = cache[key] = orbit._walk(frontier, v)
                if d > worst + 1e-12:
                    worst, where = d, (h, k)
        if where is not None:
            h, k = where
            P = _vertex_samples(x0, orbit_points(G, [h], x0)[0], samples)[k]
            where = (G.format_element(h), str(P))
        table[r] = worst
        npairs[r] = len(hs)
        wit[r] = where
    return QuasiconvexityReport(table, samples, npairs, wit, margin, seed)


# ---------------------------------------------------------------------------
# pure translations and the hull region

@dataclass
class EuclideanPowers:
    exponents: list             # k_i, or None when not found within the ball
    lattice: list               # HNF rows of the pure translations found
    radius: int
    translations: int           # pure-translation elements seen in the ball

    @property
    def complete(self):
        return all(k is not None for k in self.exponents)


def _check_axes(G, gens):
    words = [g.word for g in gens if g.word]
    if not words:
        return
    for i, f in enumerate(words):
        if all(gr.same_axis(f, g) for g in words):
            shared = [str(g) for g in words if gr.same_axis(f, g)]
            raise HypothesisViolation(
                "all nontrivial words translate along one common axis",
                detail={"common_axis": shared})


def _lcm(a, b):
    return a * b // math.gcd(a, b)


def euclidean_powers_in_subgroup(G, H_generators, R):
    """Exponents k_i with (e, k_i z_i) in H, found from pure translations in the H-ball."""
    _check_group(G)
    gens = _gens(G, H_generators)
    _check_axes(G, gens)
    ball = gr.word_metric_ball(G, R, gens)
    trans = sorted({h.z for h in ball.dist if not h.word and any(h.z)})
    L = hermite_rows(trans) if trans else []
    ks = []
    for g in gens:
        if not any(g.z) or not g.word:
            ks.append(1)
            continue
        c = lattice_coordinates(g.z, L) if L else None
        if c is None:
            ks.append(None)
            continue
        k = 1
        for x in c:
            k = _lcm(k, Fraction(x).denominator)
        ks.append(k)
    return EuclideanPowers(ks, L, R, len(trans))


@dataclass
class HullRegion:
    subtree: Subtree
    V: list                     # rational basis rows of the Euclidean factor
    anchor: tuple
    lattice: list               # pure translations found (HNF rows)
    certified: bool             # the lattice spans V
    radius: int

    def to_json(self):
        return {"subtree": self.subtree.edge_list(),
                "vertices": sorted((str(v) for v in self.subtree.vertices), key=lambda s: (len(s), s)),
                "V": [[str(x) for x in row] for row in self.V],
                "anchor": [str(x) for x in self.anchor],
                "lattice": [list(r) for r in self.lattice],
                "certified": self.certified, "radius": self.radius}


def _span_basis(vectors):
    rows, piv = rref([list(v) for v in vectors if any(v)])
    return [tuple(r) for r in rows[:len(piv)]]


def orbit_hull(G, H_generators, x0=None, R=4):
    """Hull region subtree x (anchor + V) of the orbit of the radius-R H-ball.

    The subtree is the tree hull of the projected orbit points; V is the
    span of the generators' Euclidean parts.  ``certified`` records whether
    the pure translations found in the ball already span V.
    """
    _check_group(G)
    gens = _gens(G, H_generators)
    x0 = _basepoint(G, x0)
    if any(g.word for g in gens):
        _check_axes(G, gens)
    ball = gr.word_metric_ball(G, R, gens)
    pts = orbit_points(G, sorted(ball.dist, key=G.sort_key), x0)
    sub = Subtree.spanned([P.tree for P in pts])
    V = _span_basis([g.z for g in gens])
    trans = sorted({h.z for h in ball.dist if not h.word and any(h.z)})
    L = hermite_rows(trans) if trans else []
    return HullRegion(sub, V, x0.vec, L, len(L) == len(V), R)


def hull_membership(pt, region):
    if pt.tree not in region.subtree:
        return False
    d = [a - b for a, b in zip(pt.vec, region.anchor)]
    return in_span(d, region.V)


def _tree_grid(subtree, divisions):
    pts = [TreePoint(v, 0, Fraction(0)) for v in subtree.vertices]
    for (base, x), (lo, hi) in subtree.edges.items():
        for j in range(1, divisions):
            t = Fraction(j, divisions)
            if lo <= t <= hi:
                pts.append(tree_point(base, x, t))
    return sorted(set(pts), key=lambda p: (len(p.base), tuple(p.base), p.edge, p.offset))


def _v_grid(region, orbit, divisions, max_level):
    anchor = region.anchor
    n = len(anchor)
    if not region.V:
        return [anchor]
    if region.certified:
        basis = region.lattice
        lo = [0] * len(basis)
        hi = [1] * len(basis)
    else:
        basis = region.V
        coords = [lattice_coordinates(orbit.reps[u], basis) for u in orbit.words(max_level)]
        lo = [math.floor(min(c[i] for c in coords)) for i in range(len(basis))]
        hi = [math.ceil(max(c[i] for c in coords)) for i in range(len(basis))]
    axes = []
    for a, b in zip(lo, hi):
        steps = (b - a) * divisions
        axes.append([a + Fraction(k, divisions) for k in range(steps + (0 if region.certified else 1))])
    out = []
    for coeffs in product(*axes):
        out.append(tuple(anchor[i] + sum(c * Fraction(row[i]) for c, row in zip(coeffs, basis))
                        for i in range(n)))
    return out


@dataclass
class CocompactnessReport:
    radius: int
    c_hat: float
    evaluated: int
    grid_size: int
    witness: str
    certified: bool


def cocompactness_radius(G, H_generators, R, samples=4000, x0=None, seed=0, margin=3,
                         divisions=4):
    """c_hat(R): largest sampled distance from the hull region to the orbit.

    Hull points form a grid: tree vertices and edge points at multiples of
    1/divisions, crossed with V points.  When the pure translations span V
    the V points cover one fundamental cell of that lattice (the orbit is
    invariant under it); otherwise they cover the coordinate box of the
    orbit sample.  At most ``samples`` grid points are drawn, seeded.
    """
    gens = _gens(G, H_generators)
    x0 = _basepoint(G, x0)
    region = orbit_hull(G, gens, x0, R)
    orbit = FibredOrbit(G, gens, R + margin, x0, extra_translations=region.lattice)
    tree_pts = _tree_grid(region.subtree, divisions)
    v_pts = _v_grid(region, orbit, divisions, R)
    total = len(tree_pts) * len(v_pts)
    if total <= samples:
        picks = range(total)
    else:
        rng = np.random.default_rng(seed)
        picks = np.sort(rng.choice(total, size=samples, replace=False))
    worst, where = 0.0, None
    nv = len(v_pts)
    for k in picks:
        P = ProductPoint(tree_pts[int(k) // nv], v_pts[int(k) % nv])
        d = orbit.nearest(P)
        if d > worst + 1e-12:
            worst, where = d, str(P)
    return CocompactnessReport(R, worst, len(picks), total, where, region.certified)


# ---------------------------------------------------------------------------
# virtual product structure

@dataclass
class VirtualProduct:
    A: list                     # HNF rows of H n ({e} x Z^n) found in the ball
    F: list                     # words generating the found part of H n (F_m x {0})
    index: object               # cosets of A F met by the ball, or None
    index_previous: object      # the same count one radius lower
    stable: bool
    degenerate: str             # "", "abelian" or "free abelian"
    radius: int


def _index_count(G, elements, A, folded):
    reps = []
    for h in elements:
        for r in reps:
            q = G.mul(G.inv(r), h)
            if folded.contains(q.word) and not any(lattice_reduce(q.z, A)):
                break
        else:
            reps.append(h)
    return len(reps)


def virtual_product_decomposition(G, H_generators, R):
    """Translation part A, free part F and the number of cosets of A F seen in the H-ball."""
    _check_group(G)
    gens = _gens(G, H_generators)
    words = [g.word for g in gens if g.word]
    ball = gr.word_metric_ball(G, R, gens)
    trans = sorted({h.z for h in ball.dist if not h.word and any(h.z)})
    A = hermite_rows(trans) if trans else []
    if not words:
        A = hermite_rows([g.z for g in gens if any(g.z)]) if any(any(g.z) for g in gens) else []
        return VirtualProduct(A, [], 1, 1, True, "abelian", R)
    if all(gr.same_axis(words[0], w) for w in words):
        F = sorted({h.word for h in ball.dist if h.word and not any(h.z)},
                   key=lambda w: (len(w), tuple(w)))
        return VirtualProduct(A, [str(w) for w in F[:1]], None, None, False, "free abelian", R)
    flat = sorted((h for h in ball.dist if h.word and not any(h.z)), key=G.sort_key)
    chosen = []
    folded = gr.FoldedGraph([])
    for h in flat:
        if not folded.contains(h.word):
            chosen.append(h.word)
            folded = gr.FoldedGraph(chosen)
    elems = sorted(ball.dist, key=lambda h: (ball.dist[h], G.sort_key(h)))
    idx = _index_count(G, elems, A, folded)
    prev = _index_count(G, [h for h in elems if ball.dist[h] <= R - 1], A, folded)
    return VirtualProduct(A, [str(w) for w in chosen], idx, prev, idx == prev, "", R)

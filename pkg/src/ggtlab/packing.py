"""Packing profiles and coset growth for subgroups sampled on a ball.

Everything is measured on the cosets that meet the radius-R ball B(R).  Two
cosets aH and bH are close at scale r when d(aH, bH) < r, that is when
a h s lies in bH for some h in H and some s in B(r - 1).  For the subgroup
shapes with an exact coset key this test is exact; for H = <t> in a
hyperbolic P_{n,phi} the range of powers t^j that matter is bounded with a
certified orbit window.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import groups as gr
from .cliques import max_clique
from .dynamics import certified_window_outer
from .errors import GgtError, ValidationError


def _sub_ball(ball, radius):
    return [g for g, d in ball.dist.items() if d <= radius]


def _norm(v):
    return math.sqrt(sum(x * x for x in v))


class _Neighbourhoods:
    def __init__(self, G, H, R, ball=None):
        self.G, self.H, self.R = G, H, R
        self.ball = ball if ball is not None else gr.word_metric_ball(G, R)
        self.reps = {}
        self.exact = H._key is not None or H._folded is not None
        if H._key is not None:
            for g in self.ball.dist:
                self.reps.setdefault(H._key(g), g)
        else:
            fam = gr.coset_enumerate(G, H.generators, R, ball=self.ball, subgroup=H)
            for i, g in enumerate(fam.representatives):
                self.reps[i] = g
            self.exact = self.exact and all(c is True for c in fam.certified)
        self.keys = list(self.reps)
        self._cache = {}
        self.undecided = {}
        self.window = {}

    def _poly_t_window(self, U):
        # any difference of two keys has norm at most twice the largest key
        outer = 2 * max((_norm(z) for z in self.keys), default=0)
        try:
            return certified_window_outer(self.G.phi, 0, outer, vectors=U), True
        except GgtError:
            return 2 * self.R, False

    def close_sets(self, r, only=None):
        """For each coset key (or each key in ``only``), the keys of cosets at distance < r."""
        cache_key = (r, None if only is None else tuple(only))
        if cache_key in self._cache:
            return self._cache[cache_key]
        G, H = self.G, self.H
        todo = self.keys if only is None else list(only)
        S = _sub_ball(self.ball, r - 1)
        keyset = set(self.keys)
        out = {}
        undecided = 0
        if H.kind in ("trivial", "whole", "normal"):
            # left multiplication by H does not change the key of a s
            for k in todo:
                a = self.reps[k]
                out[k] = {H._key(G.mul(a, s)) for s in S} & keyset
        elif H.kind == "poly-t":
            U = sorted({s.z for s in S})
            K, certified = self._poly_t_window(U)
            self.window[r] = K
            self.exact = self.exact and certified
            if only is not None:
                # test each candidate difference against the orbits of U
                Uset = set(U)
                for k in todo:
                    near = set()
                    for k2 in self.keys:
                        d = tuple(x - y for x, y in zip(k2, k))
                        if any(G.act(j, d) in Uset for j in range(-K, K + 1)):
                            near.add(k2)
                    out[k] = near
            else:
                orbit_pts = set()
                for u in U:
                    orbit_pts.add(u)
                    for j in range(1, K + 1):
                        orbit_pts.add(G.act(j, u))
                        orbit_pts.add(G.act(-j, u))
                for k in todo:
                    out[k] = {tuple(x + y for x, y in zip(k, d)) for d in orbit_pts} & keyset
        else:
            L = 2 * self.R
            hs = list(H.ball(L))
            for k in todo:
                a = self.reps[k]
                reach = [G.mul(G.mul(a, h), s) for h in hs for s in S]
                near = set()
                for k2, b in self.reps.items():
                    if k2 == k:
                        near.add(k2)
                        continue
                    for x in reach:
                        verdict = H.same_coset(b, x, L)
                        if verdict:
                            near.add(k2)
                            break
                    else:
                        if H._folded is None:
                            undecided += 1
                out[k] = near
            if H._folded is None:
                self.exact = False
            undecided //= 2
        self.undecided[r] = undecided
        self._cache[cache_key] = out
        return out


@dataclass
class PackingProfile:
    subgroup: str
    radius: int
    table: dict           # r -> N_hat(r)
    exact: dict           # r -> clique search exact and coset tests exact
    truncated_pairs: dict
    witnesses: dict
    windows: dict

    def rows(self):
        return [(r, self.radius, self.table[r], self.exact[r], self.truncated_pairs[r])
                for r in sorted(self.table)]


def _describe(G, gens):
    return ";".join(G.format_element(g) for g in gens) or "e"


def packing_profile(G, H_generators, r, R, ball=None):
    """Largest family of cosets meeting B(R) that are pairwise closer than r.

    ``r`` may be a single scale or an iterable of scales.
    """
    scales = [r] if isinstance(r, (int, np.integer)) else list(r)
    if any(s > R or s < 1 for s in scales):
        raise ValidationError("scales must satisfy 1 <= r <= R")
    H = gr.Subgroup(G, H_generators, search_radius=2 * R)
    nb = _Neighbourhoods(G, H, R, ball)
    table, exact, trunc, wit = {}, {}, {}, {}
    for s in sorted(scales):
        close = nb.close_sets(s)
        adj = {k: {x for x in close[k] if x != k} for k in nb.keys}
        # the test is symmetric in exact arithmetic; symmetrize defensively
        for k in adj:
            for x in adj[k]:
                adj[x].add(k)
        res = max_clique(adj)
        table[s] = len(res.clique)
        exact[s] = res.exact and nb.exact
        trunc[s] = nb.undecided.get(s, 0)
        wit[s] = [G.format_element(nb.reps[k]) for k in res.clique]
    return PackingProfile(_describe(G, H.generators), R, table, exact, trunc, wit,
                          dict(nb.window))


@dataclass
class GrowthSeries:
    subgroup: str
    radius: int
    table: dict           # r -> # cosets meeting B(R) at distance < r from H
    exact: bool
    fit: object = None

    def counts(self):
        return [self.table[r] for r in sorted(self.table)]


def coset_growth(G, H_generators, R, ball=None, fit_window=(3, None)):
    if R < 1:
        raise ValidationError("R must be at least 1")
    H = gr.Subgroup(G, H_generators, search_radius=2 * R)
    nb = _Neighbourhoods(G, H, R, ball)
    home = H._key(G.identity) if H._key is not None else next(
        k for k, g in nb.reps.items() if g == G.identity)
    table = {r: len(nb.close_sets(r, [home])[home]) for r in range(1, R + 1)}
    series = GrowthSeries(_describe(G, H.generators), R, table, nb.exact)
    lo, hi = fit_window
    pts = [r for r in table if r >= lo and (hi is None or r <= hi)]
    if len(pts) >= 4:
        series.fit = growth_rate_fit(series, lo, hi)
    return series


@dataclass
class GrowthFit:
    alpha: float
    slope: float
    intercept: float
    r_squared: float
    residual: float
    C: float
    alpha_corrected: float    # exponential rate after removing a power-law factor
    power: float
    degenerate: bool


def _equivalence_constant(rs, counts, a, b):
    # smallest C >= 1 with beta(r / C) <= f(r) <= beta(C r), beta = exp(a + b r)
    if b <= 0:
        return math.inf
    C = 1.0
    for r, f in zip(rs, counts):
        rho = (math.log(f) - a) / b
        if rho <= 0:
            return math.inf
        C = max(C, r / rho, rho / r)
    return C


def growth_rate_fit(series, r_min=3, r_max=None):
    """Least-squares fit of log count against r.

    Besides the plain exponential fit, ``alpha_corrected`` comes from fitting
    log f = a + b r + c log r, which separates a power-law factor from the
    exponential part; for polynomially growing data it tends to 1.
    """
    table = series.table if hasattr(series, "table") else dict(series)
    rs = [r for r in sorted(table) if r >= r_min and (r_max is None or r <= r_max)]
    counts = [table[r] for r in rs]
    if len(rs) < 4 or any(c <= 0 for c in counts):
        raise ValidationError("need at least 4 positive data points")
    y = np.log(np.array(counts, dtype=float))
    x = np.array(rs, dtype=float)
    if np.ptp(y) == 0:
        return GrowthFit(1.0, 0.0, float(y[0]), 1.0, 0.0, 1.0, 1.0, 0.0, True)
    A = np.column_stack([np.ones_like(x), x])
    (a, b), *_ = np.linalg.lstsq(A, y, rcond=None)
    pred = a + b * x
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    A3 = np.column_stack([np.ones_like(x), x, np.log(x)])
    (_, b3, c3), *_ = np.linalg.lstsq(A3, y, rcond=None)
    C = _equivalence_constant(rs, counts, float(a), float(b))
    return GrowthFit(float(math.exp(b)), float(b), float(a), r2, math.sqrt(ss_res / len(rs)),
                     C, float(math.exp(b3)), float(c3), False)

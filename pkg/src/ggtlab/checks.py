"""Quick invariant suites behind ``ggtlab check``."""

import math
from fractions import Fraction

import numpy as np

from . import groups as gr
from .tree import GeodesicPath, ProductPoint, tree_point


def random_word(rng, m, length):
    out = []
    while len(out) < length:
        x = int(rng.integers(1, m + 1)) * (1 if rng.integers(2) else -1)
        if out and out[-1] == -x:
            continue
        out.append(x)
    return gr.FreeWord(out)


def random_product_point(rng, m=2, n=2, depth=4, spread=5):
    w = random_word(rng, m, int(rng.integers(0, depth + 1)))
    if rng.integers(3):
        x = int(rng.integers(1, m + 1)) * (1 if rng.integers(2) else -1)
        t = tree_point(w, x, Fraction(int(rng.integers(1, 8)), 8))
    else:
        t = tree_point(w)
    vec = tuple(Fraction(int(rng.integers(-8 * spread, 8 * spread + 1)), 8) for _ in range(n))
    return ProductPoint(t, vec)


def regular_polygon(k):
    return [(math.cos(2 * math.pi * j / k), math.sin(2 * math.pi * j / k)) for j in range(k)]


def _row(name, ok, detail):
    return {"check": name, "pass": bool(ok), "detail": detail}


def run_all(seed=0, scale=1):
    from . import dynamics as dy, hull, metric_checks as mc, cubing as cb
    rng = np.random.default_rng(seed)
    rows = []
    M = dy.IntAutomorphism([[2, 1], [1, 1]])
    worst = 0
    for _ in range(20 * scale):
        z, w, a = (tuple(int(x) for x in rng.integers(-20, 21, size=2)) for _ in range(3))
        if not any(a) or z == w:
            continue
        worst = max(worst, dy.orbit_intersection_count(z, w, a, M, 30).count)
    rows.append(_row("orbit-intersection", worst <= 2, {"max_count": worst}))
    F2, Z2 = gr.FreeGroup(2), gr.FreeAbelian(2)
    ok = all(len(gr.word_metric_ball(F2, R)) == 2 * 3 ** R - 1 and
             len(gr.word_metric_ball(Z2, R)) == 2 * R * R + 2 * R + 1 for R in range(6))
    rows.append(_row("ball-counts", ok, {}))
    bad = 0
    for _ in range(50 * scale):
        n = int(rng.integers(2, 4))
        S = [tuple(int(x) for x in rng.integers(-6, 7, size=n)) for _ in range(int(rng.integers(2, 9)))]
        lam = [Fraction(int(x)) for x in rng.integers(0, 5, size=len(S))]
        if not sum(lam):
            lam[0] = Fraction(1)
        tot = sum(lam)
        x = tuple(sum(l * s[i] for l, s in zip(lam, S)) / tot for i in range(n))
        W = hull.brunn_witness(x, S)
        bad += W.depth() > n or W.evaluate() != x
    rows.append(_row("brunn-depth", bad == 0, {"failures": bad}))
    cat = conv = 0.0
    for _ in range(40 * scale):
        A, B, C = (random_product_point(rng) for _ in range(3))
        cat = max(cat, mc.cat0_comparison_check((A, B, C), 6))
        conv = max(conv, mc.metric_convexity_check(GeodesicPath(A, B), GeodesicPath(A, C), 8))
    rows.append(_row("cat0-comparison", cat <= 1e-9, {"max_violation": cat}))
    rows.append(_row("metric-convexity", conv <= 1e-9, {"max_violation": conv}))
    poly = regular_polygon(64)
    tri = -math.inf
    for _ in range(50 * scale):
        pts = []
        while len(pts) < 3:
            p = tuple(rng.uniform(-0.9, 0.9, size=2))
            if math.hypot(*p) < 0.9:
                pts.append(p)
        a, b, c = pts
        tri = max(tri, mc.hilbert_distance(poly, a, c) - mc.hilbert_distance(poly, a, b)
                  - mc.hilbert_distance(poly, b, c))
    rows.append(_row("hilbert-triangle", tri <= 1e-9, {"max_excess": tri}))
    Z = gr.FreeAbelian(1)
    S = cb.sigma_system(Z, [], 0, 8)
    cx = cb.build_cubing(S)
    w = cb.width_estimate(S)
    sep = cb.separation_to_nestedness_check(S)
    ok = cx.dimension == 1 and cx.dimension <= w.width and cx.opposite_violations == 0 \
        and sep.violations == 0
    rows.append(_row("cubing-line", ok, {"dimension": cx.dimension, "width": w.width}))
    return rows

"""Distances in Sol with the metric e^{2z}dx^2 + e^{-2z}dy^2 + dz^2.

Group law used throughout:
    (a, b, c) . (x, y, z) = (a + e^{-c} x, b + e^{c} y, c + z),
which makes the metric left invariant and sends t in P_{2,phi} to a
translation in z by log(lambda).

Upper bounds come from explicit staircase paths: vertical moves in z
alternate with straight moves at constant height, and straight moves at
constant height have the closed-form length sqrt(e^{2z}dx^2 + e^{-2z}dy^2).
Every reported upper bound is the exact length of such a path.
"""

import math
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize

from . import groups as gr
from .dynamics import IntAutomorphism, hyperbolic_eigendata
from .errors import HypothesisViolation, ValidationError


class SolPoint(NamedTuple):
    x: float
    y: float
    z: float

    def __mul__(self, other):
        return SolPoint(self.x + math.exp(-self.z) * other.x,
                        self.y + math.exp(self.z) * other.y, self.z + other.z)

    def inverse(self):
        return SolPoint(-math.exp(self.z) * self.x, -math.exp(-self.z) * self.y, -self.z)


def _point(p):
    p = SolPoint(*map(float, p))
    if not all(math.isfinite(c) for c in p):
        raise ValidationError("Sol coordinates must be finite")
    return p


def sol_lower_bound(p1, p2):
    """max(2 log|dx|, 2 log|dy|, 0) for two points of the z = 0 plane."""
    p1, p2 = _point(p1), _point(p2)
    if p1.z != 0 or p2.z != 0:
        raise ValidationError("both points must lie in the plane z = 0")
    dx, dy = abs(p2.x - p1.x), abs(p2.y - p1.y)
    vals = [0.0]
    if dx > 0:
        vals.append(2 * math.log(dx))
    if dy > 0:
        vals.append(2 * math.log(dy))
    return max(vals)


def staircase_length(X, Y, Z, heights, fx, fy):
    """Length of the path from the origin to (X, Y, Z) that climbs to each
    height in turn and there moves by (fx_i X, fy_i Y) in a straight line."""
    length = 0.0
    z = 0.0
    for h, a, b in zip(heights, fx, fy):
        length += abs(h - z)
        length += math.hypot(math.exp(h) * a * X, math.exp(-h) * b * Y)
        z = h
    return length + abs(Z - z)


def _best_height(c):
    # minimizes 2|h| + e^{h} c over h <= 0 for the x move (c > 2 gives h = log(2/c))
    return math.log(2 / c) if c > 2 else 0.0


class SolUpper(NamedTuple):
    length: float
    heights: tuple
    fx: tuple
    fy: tuple
    converged: bool


def sol_distance_upper(p1, p2, segments=64):
    """Length of the shortest staircase path found between p1 and p2.

    ``segments`` caps the number of constant-height legs used in the
    refinement.  The result is always the length of a concrete path, hence an
    upper bound on the Sol distance.
    """
    return sol_path_upper(p1, p2, segments).length


def sol_path_upper(p1, p2, segments=64):
    if segments < 1:
        raise ValidationError("segments must be at least 1")
    p1, p2 = _point(p1), _point(p2)
    X, Y, Z = p1.inverse() * p2
    if X == 0 and Y == 0:
        return SolUpper(abs(Z), (), (), (), True)
    cands = []
    # one straight leg at the best constant height
    one = minimize(lambda h: staircase_length(X, Y, Z, [h[0]], [1], [1]), [0.0],
                   method="Nelder-Mead", options={"xatol": 1e-12, "fatol": 1e-14})
    cands.append(([float(one.x[0])], [1.0], [1.0]))
    cands.append(([0.0], [1.0], [1.0]))
    if segments >= 2:
        hx = _best_height(abs(X)) if X else 0.0
        hy = -_best_height(abs(Y)) if Y else 0.0
        # x at low height then y at high height, and the reverse order
        cands.append(([min(hx, 0.0), hy], [1.0, 0.0], [0.0, 1.0]))
        cands.append(([hy, min(hx, 0.0)], [0.0, 1.0], [1.0, 0.0]))
    best = min(cands, key=lambda c: staircase_length(X, Y, Z, *c))
    converged = True
    legs = min(segments, 3)
    if legs >= 2:
        refined, ok = _refine(X, Y, Z, best, legs)
        converged = ok
        if staircase_length(X, Y, Z, *refined) < staircase_length(X, Y, Z, *best):
            best = refined
    h, fx, fy = best
    return SolUpper(staircase_length(X, Y, Z, h, fx, fy), tuple(h), tuple(fx), tuple(fy),
                    converged)


def _split(raw, m):
    # softmax weights so the fractions stay on the simplex
    w = np.exp(raw - raw.max())
    return w / w.sum()


def _refine(X, Y, Z, start, m):
    h0, fx0, fy0 = start
    h0, fx0, fy0 = list(h0), list(fx0), list(fy0)
    while len(h0) < m:
        h0.append(h0[-1])
        fx0.append(0.0)
        fy0.append(0.0)
    eps = 1e-6
    x0 = np.concatenate([h0, np.log(np.array(fx0) + eps), np.log(np.array(fy0) + eps)])

    def f(v):
        h = v[:m]
        return staircase_length(X, Y, Z, h, _split(v[m:2 * m], m), _split(v[2 * m:], m))

    res = minimize(f, x0, method="L-BFGS-B", options={"maxiter": 500})
    v = res.x
    return (list(map(float, v[:m])), list(map(float, _split(v[m:2 * m], m))),
            list(map(float, _split(v[2 * m:], m)))), bool(res.success)


class SolEmbedding(NamedTuple):
    f: np.ndarray
    log_lambda: float
    v_minus: np.ndarray
    v_plus: np.ndarray


def _unit_sign(v):
    v = v / np.linalg.norm(v)
    i = int(np.flatnonzero(np.abs(v) > 1e-12)[0])
    return v if v[i] > 0 else -v


def sol_embedding(phi):
    phi = phi if isinstance(phi, IntAutomorphism) else IntAutomorphism(phi)
    if phi.n != 2:
        raise HypothesisViolation("Sol embedding needs a 2x2 matrix")
    eig = hyperbolic_eigendata(phi)
    lam_minus, lam_plus = eig.values
    if not (0 < lam_minus < 1 < lam_plus) or abs(lam_minus * lam_plus - 1) > 1e-9:
        raise HypothesisViolation("eigenvalues must be 0 < 1/lambda < 1 < lambda")
    vm = _unit_sign(eig.vectors[:, 0])
    vp = _unit_sign(eig.vectors[:, 1])
    f = np.linalg.inv(np.column_stack([vm, vp]))
    return SolEmbedding(f, math.log(lam_plus), vm, vp)


def sol_embed(k, l, q, phi):
    """Image of e1^k e2^l t^q: (f(k, l), q log lambda)."""
    emb = phi if isinstance(phi, SolEmbedding) else sol_embedding(phi)
    x, y = emb.f @ np.array([k, l], dtype=float)
    return SolPoint(float(x), float(y), q * emb.log_lambda)


class DistortionReport(NamedTuple):
    samples: int
    euclid_vs_max_violations: int      # d <= sqrt2 max|d_i|
    log_form_printed_violations: int   # log d <= max log|d_i| + log(1/sqrt2)
    log_form_corrected_violations: int # log d <= max log|d_i| + log(sqrt2)
    sol_printed_violations: int        # path upper bound below 2 log d + log 2
    sol_corrected_violations: int      # path upper bound below 2 log d - log 2
    lower_bound_violations: int              # path upper bound below max(2log|dx|, 2log|dy|)
    fit_C: float
    fit_A: float
    fit_pairs: int
    axis_upper: float                  # path length from (0,0,0) to (8,0,0)
    axis_printed_bound: float          # 2 log 8 + log 2


def distortion_check(phi, samples=200, seed=0, coord_range=50, word_radius=10, ball=None):
    """Sampled checks of the plane-distortion chain and a log fit of word lengths."""
    phi = phi if isinstance(phi, IntAutomorphism) else IntAutomorphism(phi)
    emb = sol_embedding(phi)
    rng = np.random.default_rng(seed)
    counts = dict(a=0, b=0, c=0, d=0, e=0, f=0)
    done = 0
    while done < samples:
        u = rng.integers(-coord_range, coord_range + 1, size=2)
        if not u.any():
            continue
        done += 1
        P = sol_embed(int(u[0]), int(u[1]), 0, emb)
        dx, dy = abs(P.x), abs(P.y)
        d = math.hypot(dx, dy)
        m = max(dx, dy)
        counts["a"] += d > math.sqrt(2) * m * (1 + 1e-12)
        counts["b"] += math.log(d) > math.log(m) - 0.5 * math.log(2) + 1e-12
        counts["c"] += math.log(d) > math.log(m) + 0.5 * math.log(2) + 1e-12
        up = sol_distance_upper((0, 0, 0), P)
        counts["d"] += up < 2 * math.log(d) + math.log(2) - 1e-9
        counts["e"] += up < 2 * math.log(d) - math.log(2) - 1e-9
        counts["f"] += up < sol_lower_bound((0, 0, 0), (P.x, P.y, 0)) - 1e-9
    G = gr.PolyGroup(phi)
    if ball is None:
        ball = gr.word_metric_ball(G, word_radius)
    plane = sorted((g for g in ball.dist if g.k == 0 and any(g.z)), key=G.sort_key)
    pick = rng.permutation(len(plane))[:samples]
    xs = np.array([math.log(sum(abs(c) for c in plane[i].z)) for i in pick])
    ys = np.array([ball.distance(plane[i]) for i in pick], dtype=float)
    C, A = np.polyfit(xs, ys, 1)
    return DistortionReport(samples, counts["a"], counts["b"], counts["c"], counts["d"],
                            counts["e"], counts["f"], float(C), float(A), len(pick),
                            sol_distance_upper((0, 0, 0), (8, 0, 0)),
                            2 * math.log(8) + math.log(2))

"""Numerical self-checks of the product metric on T_{2m} x R^n, and the
Hilbert metric of a convex polygon."""

import math
from fractions import Fraction

from .errors import ValidationError
from .tree import GeodesicPath, product_distance

TRIANGLE_SLACK = 1e-12


def comparison_angle(d_ab, d_ac, d_bc):
    """Angle at a of the Euclidean triangle with the given side lengths."""
    sides = (d_ab, d_ac, d_bc)
    if any(not math.isfinite(s) or s <= 0 for s in sides):
        raise ValidationError("side lengths must be positive and finite")
    big = max(sides)
    if 2 * big > sum(sides) + TRIANGLE_SLACK * max(1.0, big):
        raise ValidationError("side lengths violate the triangle inequality")
    c = (d_ab ** 2 + d_ac ** 2 - d_bc ** 2) / (2 * d_ab * d_ac)
    return math.acos(min(1.0, max(-1.0, c)))


def _comparison_triangle(d_ab, d_ac, d_bc):
    if d_ab == 0 or d_ac == 0:
        theta = 0.0
    elif d_bc == 0:
        theta = 0.0
    else:
        c = (d_ab ** 2 + d_ac ** 2 - d_bc ** 2) / (2 * d_ab * d_ac)
        theta = math.acos(min(1.0, max(-1.0, c)))
    return (0.0, 0.0), (d_ab, 0.0), (d_ac * math.cos(theta), d_ac * math.sin(theta))


def _lerp(p, q, t):
    return (p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1]))


def cat0_comparison_check(triangle, samples=16):
    """Largest d(p, q) - d(p', q') over sampled pairs on the sides of a
    geodesic triangle, where p', q' are the comparison points."""
    if samples < 2:
        raise ValidationError("samples must be at least 2")
    A, B, C = triangle
    d_ab, d_ac, d_bc = product_distance(A, B), product_distance(A, C), product_distance(B, C)
    a, b, c = _comparison_triangle(d_ab, d_ac, d_bc)
    sides = [(GeodesicPath(A, B), a, b), (GeodesicPath(A, C), a, c), (GeodesicPath(B, C), b, c)]
    ts = [k / (samples - 1) for k in range(samples)]
    fr = [Fraction(k, samples - 1) for k in range(samples)]
    pts = [[(g.point_at(f), _lerp(p, q, t)) for f, t in zip(fr, ts)] for g, p, q in sides]
    worst = -math.inf
    for i in range(3):
        for j in range(i + 1, 3):
            for x, xb in pts[i]:
                for y, yb in pts[j]:
                    worst = max(worst, product_distance(x, y) - math.dist(xb, yb))
    return worst


def metric_convexity_check(path1, path2, samples=32):
    """max over t of d(l1(t), l2(t)) - t d(l1(1), l2(1)) for geodesics with a common start."""
    if path1.start != path2.start:
        raise ValidationError("geodesics must share their starting point")
    end = product_distance(path1.end, path2.end)
    worst = -math.inf
    for k in range(samples):
        t = Fraction(k, samples - 1)
        d = product_distance(path1.point_at(t), path2.point_at(t))
        worst = max(worst, d - float(t) * end)
    return worst


def _cross(o, p, q):
    return (p[0] - o[0]) * (q[1] - o[1]) - (p[1] - o[1]) * (q[0] - o[0])


def _check_polygon(body):
    pts = [tuple(map(float, p)) for p in body]
    if len(pts) < 3:
        raise ValidationError("polygon needs at least 3 vertices")
    n = len(pts)
    turns = [_cross(pts[i], pts[(i + 1) % n], pts[(i + 2) % n]) for i in range(n)]
    if any(t == 0 for t in turns) or not (all(t > 0 for t in turns) or all(t < 0 for t in turns)):
        raise ValidationError("polygon must be strictly convex")
    if turns[0] < 0:
        pts.reverse()
    return pts


def _interior(pts, a):
    n = len(pts)
    return all(_cross(pts[i], pts[(i + 1) % n], a) > 0 for i in range(n))


def hilbert_distance(body, a1, a2):
    """log of the cross ratio [a1, a2, b1, b2] along the chord through a1 and a2."""
    pts = _check_polygon(body)
    a1, a2 = tuple(map(float, a1)), tuple(map(float, a2))
    for a in (a1, a2):
        if not _interior(pts, a):
            raise ValidationError("points must lie strictly inside the polygon")
    if a1 == a2:
        return 0.0
    L = math.dist(a1, a2)
    dx, dy = (a2[0] - a1[0]) / L, (a2[1] - a1[1]) / L
    lo, hi = -math.inf, math.inf
    # a1 + s u (unit direction u) stays inside while every edge inequality holds
    n = len(pts)
    for i in range(n):
        p, q = pts[i], pts[(i + 1) % n]
        ex, ey = q[0] - p[0], q[1] - p[1]
        c0 = ex * (a1[1] - p[1]) - ey * (a1[0] - p[0])
        c1 = ex * dy - ey * dx
        if c1 > 0:
            lo = max(lo, -c0 / c1)
        elif c1 < 0:
            hi = min(hi, -c0 / c1)
    # arc length on the chord: b1 at lo < 0, a1 at 0, a2 at L, b2 at hi > L
    return math.log1p(L / -lo) - math.log1p(-L / hi)

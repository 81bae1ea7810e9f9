"""Exact convex combinations in Q^n: Caratheodory supports and Brunn witnesses.

A Brunn witness writes a point of conv(S) as an iterated two-point join
(1 - t) left + t right over points of S.  Peeling one barycentric
coordinate per level from a Caratheodory support of size k + 1 gives a tree
of depth k <= n.
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .errors import NotInHullError, ValidationError

ENUMERATION_LIMIT = 12


def _vec(v):
    return tuple(Fraction(x) for x in v)


def _solve_exact(cols, rhs):
    """Unique solution of sum c_j cols[j] = rhs, or None (singular or inconsistent)."""
    n, k = len(rhs), len(cols)
    M = [[cols[j][i] for j in range(k)] + [rhs[i]] for i in range(n)]
    piv_rows = []
    r = 0
    for c in range(k):
        p = next((i for i in range(r, n) if M[i][c] != 0), None)
        if p is None:
            return None
        M[r], M[p] = M[p], M[r]
        inv = 1 / M[r][c]
        M[r] = [x * inv for x in M[r]]
        for i in range(n):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        piv_rows.append(r)
        r += 1
    if any(M[i][k] != 0 for i in range(r, n)):
        return None
    return [M[i][k] for i in piv_rows]


def _lift(p):
    return tuple(p) + (Fraction(1),)


def feasibility_lp(S, x):
    """Exact phase-one simplex (Bland's rule) for lambda >= 0, sum lambda_j (s_j, 1) = (x, 1).

    Returns ("feasible", {index: weight}) with a basic solution, or
    ("infeasible", (normal, offset)) with normal.s <= offset for all s in S
    and normal.x > offset.
    """
    A = [_lift(s) for s in S]
    b = list(_lift(x))
    m, k = len(b), len(A)
    # rows: one per coordinate; make rhs nonnegative
    rows = []
    signs = []
    for i in range(m):
        sg = -1 if b[i] < 0 else 1
        signs.append(sg)
        rows.append([sg * A[j][i] for j in range(k)] + [Fraction(int(i == r)) for r in range(m)]
                    + [sg * b[i]])
    basis = [k + i for i in range(m)]
    ncols = k + m
    cost = [Fraction(0)] * k + [Fraction(1)] * m

    def reduced(j):
        return cost[j] - sum(cost[basis[i]] * rows[i][j] for i in range(m))

    while True:
        enter = next((j for j in range(ncols) if reduced(j) < 0), None)
        if enter is None:
            break
        ratios = [(rows[i][-1] / rows[i][enter], basis[i], i) for i in range(m)
                  if rows[i][enter] > 0]
        _, _, leave = min(ratios)
        piv = rows[leave][enter]
        rows[leave] = [v / piv for v in rows[leave]]
        for i in range(m):
            if i != leave and rows[i][enter] != 0:
                f = rows[i][enter]
                rows[i] = [a - f * c for a, c in zip(rows[i], rows[leave])]
        basis[leave] = enter
    obj = sum(cost[basis[i]] * rows[i][-1] for i in range(m))
    if obj == 0:
        sol = {basis[i]: rows[i][-1] for i in range(m) if basis[i] < k and rows[i][-1] != 0}
        return "feasible", sol
    # duals y_i = c_B B^-1, read off the artificial columns
    y = [cost[k + i] - reduced(k + i) for i in range(m)]
    y = [y[i] * signs[i] for i in range(m)]
    normal = tuple(y[:-1])
    offset = -y[-1]
    return "infeasible", (normal, offset)


def separating_certificate(S, x):
    status, data = feasibility_lp(S, x)
    return None if status == "feasible" else data


@dataclass(frozen=True)
class Decomposition:
    points: tuple
    weights: tuple
    indices: tuple

    def evaluate(self):
        n = len(self.points[0])
        return tuple(sum(w * p[i] for w, p in zip(self.weights, self.points)) for i in range(n))


def _affinely_independent(pts):
    if len(pts) <= 1:
        return True
    base = pts[0]
    diffs = [[a - b for a, b in zip(p, base)] for p in pts[1:]]
    from .intlinalg import rank
    return rank(diffs) == len(diffs)


def caratheodory_decompose(x, S):
    """x as an exact convex combination of at most n + 1 affinely independent points of S."""
    S = [_vec(s) for s in S]
    x = _vec(x)
    if not S:
        raise ValidationError("S must be nonempty")
    n = len(x)
    if any(len(s) != n for s in S):
        raise ValidationError("dimension mismatch")
    order = sorted(range(len(S)), key=lambda i: S[i])
    if len(S) <= ENUMERATION_LIMIT:
        for size in range(1, min(n + 1, len(S)) + 1):
            for sub in combinations(order, size):
                lam = _solve_exact([_lift(S[i]) for i in sub], _lift(x))
                if lam is not None and all(l > 0 for l in lam):
                    return Decomposition(tuple(S[i] for i in sub), tuple(lam), tuple(sub))
        raise NotInHullError("point is not in the convex hull",
                              certificate=separating_certificate(S, x))
    status, data = feasibility_lp([S[i] for i in order], x)
    if status == "infeasible":
        raise NotInHullError("point is not in the convex hull", certificate=data)
    support = sorted(data)
    sub = [order[j] for j in support]
    lam = [data[j] for j in support]
    sub, lam = _reduce_support(S, sub, lam)
    return Decomposition(tuple(S[i] for i in sub), tuple(lam), tuple(sub))


def _reduce_support(S, sub, lam):
    # classical Caratheodory elimination along an affine dependency
    while not _affinely_independent([S[i] for i in sub]):
        from .intlinalg import nullspace
        cols = [list(_lift(S[i])) for i in sub]
        mat = [[cols[j][r] for j in range(len(sub))] for r in range(len(cols[0]))]
        mu = nullspace(mat, len(sub))[0]
        if not any(m > 0 for m in mu):
            mu = [-m for m in mu]
        ratio = min(l / m for l, m in zip(lam, mu) if m > 0)
        lam = [l - ratio * m for l, m in zip(lam, mu)]
        keep = [j for j, l in enumerate(lam) if l != 0]
        sub = [sub[j] for j in keep]
        lam = [lam[j] for j in keep]
    return sub, lam


@dataclass(frozen=True)
class Leaf:
    point: tuple

    def evaluate(self):
        return self.point

    def depth(self):
        return 0

    def to_json(self):
        return {"point": [str(c) for c in self.point]}


@dataclass(frozen=True)
class Join:
    t: Fraction
    left: object
    right: object

    def evaluate(self):
        a, b = self.left.evaluate(), self.right.evaluate()
        return tuple((1 - self.t) * u + self.t * v for u, v in zip(a, b))

    def depth(self):
        return 1 + max(self.left.depth(), self.right.depth())

    def to_json(self):
        return {"t": str(self.t), "left": self.left.to_json(), "right": self.right.to_json()}


def brunn_witness(x, S):
    """Join tree of depth <= n evaluating exactly to x."""
    dec = caratheodory_decompose(x, S)
    pts, lam = list(dec.points), list(dec.weights)
    return _peel(pts, lam)


def _peel(pts, lam):
    if len(pts) == 1:
        return Leaf(pts[0])
    head = lam[0]
    rest = 1 - head
    sub = _peel(pts[1:], [l / rest for l in lam[1:]])
    return Join(rest, Leaf(pts[0]), sub)


def in_hull(x, S):
    try:
        caratheodory_decompose(x, S)
        return True
    except NotInHullError:
        return False

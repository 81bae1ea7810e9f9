"""Spectra, splittings and orbit dynamics of integer automorphisms of Z^n.

Decisions that must be exact (unit-circle membership, rational root spaces,
invariant sublattices) are made with integer polynomial arithmetic; floating
point only enters where eigenvectors are irrational, and those results are
flagged.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import numpy as np
import scipy.linalg
import sympy

from . import intlinalg as il
from .errors import HypothesisViolation, PrecisionError, ValidationError

TOL = 1e-9
_X = sympy.Symbol("x")


def parse_matrix(text):
    """Parse ``"2,1;1,1"`` into a list of integer rows."""
    try:
        rows = [[int(x) for x in r.split(",")] for r in text.strip().split(";") if r.strip()]
    except ValueError as exc:
        raise ValidationError(f"bad matrix literal {text!r}") from exc
    if not rows or any(len(r) != len(rows) for r in rows):
        raise ValidationError(f"matrix {text!r} is not square")
    return rows


class IntAutomorphism:
    """Square integer matrix with determinant +1 or -1."""

    def __init__(self, rows):
        if isinstance(rows, str):
            rows = parse_matrix(rows)
        rows = [[int(x) for x in r] for r in rows]
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise ValidationError("automorphism must be a nonempty square matrix")
        det = il.det_bareiss(rows)
        if det not in (1, -1):
            raise ValidationError(f"determinant is {det}, not +1 or -1")
        inv = il.rational_inverse(rows)
        self.n = n
        self.det = det
        self.rows = tuple(tuple(r) for r in rows)
        self.inverse_rows = tuple(tuple(int(x) for x in r) for r in inv)

    @classmethod
    def from_text(cls, text):
        return cls(parse_matrix(text))

    def to_text(self):
        return ";".join(",".join(map(str, r)) for r in self.rows)

    def apply(self, v):
        return il.mat_vec(self.rows, v)

    def apply_inverse(self, v):
        return il.mat_vec(self.inverse_rows, v)

    def inverse(self):
        return IntAutomorphism(self.inverse_rows)

    def as_float(self):
        return np.array(self.rows, dtype=float)

    def __eq__(self, other):
        return isinstance(other, IntAutomorphism) and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        return f"IntAutomorphism({self.to_text()!r})"


def _as_auto(M):
    return M if isinstance(M, IntAutomorphism) else IntAutomorphism(M)


# ---------------------------------------------------------------------------
# polynomial data

def charpoly_coeffs(M):
    """Integer coefficients of det(xI - M), highest degree first."""
    M = _as_auto(M)
    p = sympy.Matrix(M.rows).charpoly(_X)
    return [int(c) for c in p.all_coeffs()]


def _eval_poly_at_matrix(coeffs, rows):
    n = len(rows)
    acc = [[0] * n for _ in range(n)]
    for c in coeffs:
        acc = il.mat_mul(acc, rows)
        for i in range(n):
            acc[i][i] += c
    return acc


def _unit_circle_roots(poly):
    """Exact number of roots of an irreducible integer polynomial with |root| = 1."""
    d = poly.degree()
    a = [int(c) for c in reversed(poly.all_coeffs())]  # a[i] is the x^i coefficient
    if d == 1:
        root = Fraction(-a[0], a[1])
        return 1 if abs(root) == 1 else 0
    recip = sympy.Poly(list(a), _X)  # coefficients reversed = x^d p(1/x)
    if sympy.gcd(poly, recip).degree() == 0:
        return 0
    # reciprocal: p(x) = x^h g(x + 1/x); unit-circle roots are real roots of g in [-2, 2]
    h = d // 2
    y = sympy.Symbol("y")
    P = [sympy.Integer(2), y]
    for _ in range(2, h + 1):
        P.append(sympy.expand(y * P[-1] - P[-2]))
    g = sympy.Integer(a[h])
    for j in range(1, h + 1):
        g += a[h + j] * P[j]
    gp = sympy.Poly(sympy.expand(g), y)
    return 2 * int(gp.count_roots(-2, 2))


class Root(NamedTuple):
    value: complex
    radius: float
    multiplicity: int


@dataclass(frozen=True)
class Factor:
    coeffs: tuple          # irreducible integer factor, highest degree first
    multiplicity: int
    roots: tuple           # Root entries, multiplicity 1 each
    n_unit: int            # exact count of roots on the unit circle
    n_inside: int
    n_outside: int


@dataclass(frozen=True)
class Spectrum:
    roots: tuple
    spectral_radius: float
    radius_error: float
    charpoly: tuple
    factors: tuple = field(repr=False)

    @property
    def multiplicity_total(self):
        return sum(r.multiplicity for r in self.roots)


def spectrum(M, eps=Fraction(1, 10 ** 14)):
    """All roots of the characteristic polynomial with certified error radii."""
    M = _as_auto(M)
    coeffs = charpoly_coeffs(M)
    p = sympy.Poly(coeffs, _X)
    _, flist = p.factor_list()
    factors, roots = [], []
    for fac, mult in sorted(flist, key=lambda fm: (fm[0].degree(), fm[0].all_coeffs())):
        froots = []
        eps_q = sympy.Rational(eps.numerator, eps.denominator)
        real_iv, cplx_iv = fac.intervals(all=True, eps=eps_q)
        for (lo, hi), _m in real_iv + cplx_iv:
            lo, hi = complex(sympy.N(lo, 30)), complex(sympy.N(hi, 30))
            center = (lo + hi) / 2
            rad = abs(hi - lo) / 2 + 1e-15 * max(1.0, abs(center))
            froots.append(Root(center, rad, 1))
        froots.sort(key=lambda r: (round(abs(r.value), 12), r.value.imag))
        n_unit = _unit_circle_roots(fac)
        by_gap = sorted(froots, key=lambda r: abs(abs(r.value) - 1))
        off = by_gap[n_unit:]
        n_in = sum(1 for r in off if abs(r.value) < 1)
        factors.append(Factor(tuple(int(c) for c in fac.all_coeffs()), mult, tuple(froots),
                              n_unit, n_in, len(off) - n_in))
        roots += [Root(r.value, r.radius, mult) for r in froots]
    rho = max(abs(r.value) for r in roots)
    err = max(r.radius for r in roots)
    return Spectrum(tuple(roots), rho, err, tuple(coeffs), tuple(factors))


def is_hyperbolic(M):
    """True iff no eigenvalue lies on the unit circle (decided exactly)."""
    M = _as_auto(M)
    n = M.n
    for sign in (1, -1):
        shifted = [[M.rows[i][j] - sign * int(i == j) for j in range(n)] for i in range(n)]
        if il.det_bareiss(shifted) == 0:
            return False
    return all(f.n_unit == 0 for f in spectrum(M).factors)


# ---------------------------------------------------------------------------
# splitting

@dataclass
class SpectralSplitting:
    basis_minus: list
    basis_plus: list
    basis_zero: list
    exact_minus: bool
    exact_plus: bool
    exact_zero: bool
    residuals: dict

    def dims(self):
        return len(self.basis_minus), len(self.basis_plus), len(self.basis_zero)


def _root_space(coeffs, mult, rows):
    P = _eval_poly_at_matrix(list(coeffs), rows)
    Q = P
    for _ in range(mult - 1):
        Q = il.mat_mul(Q, P)
    return il.nullspace(Q, len(rows))


def _numeric_split(basis, M, counts):
    """Split a rational invariant subspace into inside/outside/unit parts numerically."""
    B = np.array([[float(x) for x in v] for v in basis]).T
    Q0, _ = np.linalg.qr(B)
    A = Q0.T @ M.as_float() @ Q0
    out = {}
    for name, test, expected in (("minus", lambda lam: abs(lam) < 1, counts[0]),
                                 ("plus", lambda lam: abs(lam) > 1, counts[1])):
        if expected == 0:
            out[name] = []
            continue
        # unit circle roots are excluded by construction of the sort key
        key = (lambda t: (lambda x: t(x) and abs(abs(x) - 1) > 1e-7))(test)
        T, Z, sdim = scipy.linalg.schur(A, output="real", sort=key)
        if sdim != expected:
            raise PrecisionError(f"numeric split found {sdim} roots, expected {expected}")
        out[name] = list((Q0 @ Z[:, :sdim]).T)
    if counts[2]:
        key = lambda x: abs(abs(x) - 1) <= 1e-7
        T, Z, sdim = scipy.linalg.schur(A, output="real", sort=key)
        if sdim != counts[2]:
            raise PrecisionError("numeric split could not isolate unit-circle roots")
        out["zero"] = list((Q0 @ Z[:, :sdim]).T)
    else:
        out["zero"] = []
    return out


def _residual(M, vecs):
    if not vecs:
        return 0.0
    Q, _ = np.linalg.qr(np.array(vecs, dtype=float).T)
    A = M.as_float()
    R = A @ Q - Q @ (Q.T @ A @ Q)
    return float(np.abs(R).max())


def spectral_splitting(M):
    M = _as_auto(M)
    sp = spectrum(M)
    parts = {"minus": [], "plus": [], "zero": []}
    exact = {"minus": True, "plus": True, "zero": True}
    for f in sp.factors:
        space = _root_space(f.coeffs, f.multiplicity, M.rows)
        counts = (f.n_inside, f.n_outside, f.n_unit)
        pure = [name for name, c in zip(("minus", "plus", "zero"), counts) if c]
        if len(pure) == 1:
            parts[pure[0]] += [tuple(v) for v in space]
        else:
            scaled = tuple(c * f.multiplicity for c in counts)
            num = _numeric_split(space, M, scaled)
            for name in pure:
                parts[name] += num[name]
                exact[name] = False
    for name in parts:
        if not exact[name]:
            parts[name] = [np.asarray([float(x) for x in v]) for v in parts[name]]
    residuals = {}
    for name in parts:
        if exact[name]:
            residuals[name] = 0.0 if _exact_invariant(M, parts[name]) else float("inf")
        else:
            residuals[name] = _residual(M, parts[name])
    return SpectralSplitting(parts["minus"], parts["plus"], parts["zero"],
                             exact["minus"], exact["plus"], exact["zero"], residuals)


def _exact_invariant(M, vecs):
    return all(il.in_span(il.mat_vec(M.rows, v), vecs) for v in vecs)


# ---------------------------------------------------------------------------
# adapted norm

@dataclass
class AdaptedNorm:
    basis_change: np.ndarray
    delta: float
    certified_bound: float
    epsilon: float
    spectral_radius: float

    def norm(self, v):
        return float(np.linalg.norm(self.basis_change @ np.asarray(v, dtype=float)))


def _rational_matrix(M):
    if isinstance(M, IntAutomorphism):
        return [[Fraction(x) for x in r] for r in M.rows]
    try:
        rows = [[Fraction(x) if not isinstance(x, float) else None for x in r] for r in M]
    except TypeError:
        return None
    if any(x is None for r in rows for x in r):
        return None
    return rows


def _is_diagonalizable_exact(R):
    """Minimal polynomial squarefree, tested over Q."""
    sm = sympy.Matrix(R)
    p = sm.charpoly(_X).as_expr()
    sqf = sympy.Poly(sympy.quo(p, sympy.gcd(p, sympy.diff(p, _X))), _X)
    acc = sympy.zeros(*sm.shape)
    for c in sqf.all_coeffs():
        acc = acc * sm + c * sympy.eye(sm.shape[0])
    return acc.is_zero_matrix


def _opnorm(A):
    return float(np.linalg.svd(A, compute_uv=False)[0])


def adapted_norm(M, delta):
    """Basis change B with ||B M B^-1|| certified below rho(M) + delta."""
    if not delta > 0:
        raise ValidationError("delta must be positive")
    R = _rational_matrix(M)
    A = M.as_float() if isinstance(M, IntAutomorphism) else np.array(
        [[float(x) for x in r] for r in M])
    n = A.shape[0]
    w, V = np.linalg.eig(A)
    rho = float(np.max(np.abs(w)))
    diag = _is_diagonalizable_exact(R) if R is not None else np.linalg.cond(V) < 1e8
    margin = 1e-12 * (1 + rho)
    if diag:
        cols, i = [], 0
        order = np.argsort(-np.abs(w), kind="stable")
        used = set()
        for i in order:
            if i in used:
                continue
            lam, v = w[i], V[:, i]
            if abs(lam.imag) < 1e-12:
                cols.append(np.real(v))
                used.add(i)
            else:
                j = next(j for j in order if j not in used and j != i
                         and abs(w[j] - np.conj(lam)) < 1e-9 * (1 + abs(lam)))
                cols += [np.real(v), np.imag(v)]
                used.update((i, j))
        P = np.array(cols).T
        B = np.linalg.inv(P)
        bound = _opnorm(B @ A @ P) + margin
        if bound < rho + delta:
            return AdaptedNorm(B, delta, bound, 0.0, rho)
    # Schur form, 2x2 blocks rotated to normal form, then graded scaling
    T, Q = scipy.linalg.schur(A, output="real")
    S = np.eye(n)
    blocks, i = [], 0
    while i < n:
        if i + 1 < n and abs(T[i + 1, i]) > 1e-14:
            K = T[i:i + 2, i:i + 2]
            lw, lv = np.linalg.eig(K)
            v = lv[:, 0]
            S[i:i + 2, i:i + 2] = np.column_stack([np.real(v), np.imag(v)])
            blocks += [len(blocks)] * 2
            i += 2
        else:
            blocks.append(len(blocks))
            i += 1
    T2 = np.linalg.solve(S, T @ S)
    eps = float(delta)
    for _ in range(200):
        D = np.diag([eps ** b for b in blocks])
        C = np.linalg.solve(D, T2 @ D)
        bound = _opnorm(C) + margin
        if bound < rho + delta:
            P = Q @ S @ D
            B = np.linalg.inv(P)
            return AdaptedNorm(B, delta, bound, eps, rho)
        eps /= 2
    raise PrecisionError("adapted norm bound not certified at double precision")


# ---------------------------------------------------------------------------
# orbits

@dataclass(frozen=True)
class OrbitWindow:
    base: tuple
    lo: int
    hi: int
    points: tuple

    def at(self, i):
        return self.points[i - self.lo]


def orbit(z, M, lo, hi):
    if lo > 0 or hi < 0:
        raise ValidationError("orbit window must contain 0")
    M = _as_auto(M)
    z = tuple(int(x) for x in z)
    fwd = [z]
    for _ in range(hi):
        fwd.append(M.apply(fwd[-1]))
    back = []
    v = z
    for _ in range(-lo):
        v = M.apply_inverse(v)
        back.append(v)
    return OrbitWindow(z, lo, hi, tuple(reversed(back)) + tuple(fwd))


@dataclass(frozen=True)
class Eigendata:
    values: np.ndarray      # real positive eigenvalues
    vectors: np.ndarray     # columns
    inverse: np.ndarray
    expanding: np.ndarray   # boolean mask


def hyperbolic_eigendata(M):
    """Check hyperbolic + diagonalizable + positive real spectrum; return eigendata."""
    M = _as_auto(M)
    sp = spectrum(M)
    for f in sp.factors:
        if f.n_unit:
            raise HypothesisViolation("matrix is not hyperbolic", detail=f.coeffs)
        for r in f.roots:
            if abs(r.value.imag) > r.radius or r.value.real <= 0:
                raise HypothesisViolation(
                    "eigenvalues must be real and positive", detail=complex(r.value))
    if not _is_diagonalizable_exact([[Fraction(x) for x in r] for r in M.rows]):
        raise HypothesisViolation("matrix is not diagonalizable")
    w, V = np.linalg.eig(M.as_float())
    w = np.real(w)
    V = np.real(V)
    V = V / np.linalg.norm(V, axis=0)
    order = np.argsort(w)
    w, V = w[order], V[:, order]
    return Eigendata(w, V, np.linalg.inv(V), w > 1)


def _log_env(logs, k):
    """(log min, log max) of lambda^k over eigenvalues with the given logs."""
    p = k * logs
    return float(p.min()), float(p.max())


def _first_true(pred, lo=-10 ** 6, hi=10 ** 6):
    """Smallest integer in [lo, hi] where a monotone (False..True) predicate holds."""
    if not pred(hi):
        return hi + 1
    while lo < hi:
        mid = (lo + hi) // 2
        if pred(mid):
            hi = mid
        else:
            lo = mid + 1
    return lo


class IntersectionResult(NamedTuple):
    count: int
    pairs: list
    total_count: int
    total_pairs: list
    search_bound: int
    certified: bool


def orbit_intersection_count(z, w, a, M, window):
    """Pairs (i, j), |i|,|j| <= window, with phi^i z = a + phi^j w.

    Besides the windowed brute force, every solution in Z x Z is found by a
    search whose range is bounded by the expanding/contracting growth rates;
    ``certified`` says the window already contains all of them.
    """
    M = _as_auto(M)
    z, w, a = (tuple(int(x) for x in v) for v in (z, w, a))
    if not any(a):
        raise HypothesisViolation("a = 0 allows unbounded intersections")
    if not any(z) or not any(w):
        raise HypothesisViolation("z and w must be nonzero")
    eig = hyperbolic_eigendata(M)
    oz = orbit(z, M, -window, window)
    ow = orbit(w, M, -window, window)
    index = {}
    for j in range(-window, window + 1):
        index.setdefault(tuple(x + y for x, y in zip(a, ow.at(j))), []).append(j)
    pairs = []
    for i in range(-window, window + 1):
        for j in index.get(oz.at(i), ()):
            pairs.append((i, j))
    total, bound = _all_intersections(z, w, a, M, eig)
    certified = all(abs(i) <= window and abs(j) <= window for i, j in total)
    return IntersectionResult(len(pairs), pairs, len(total), total, bound, certified)


def _all_intersections(z, w, a, M, eig, tol=1e-9):
    # With d = i - j and k = -j the equation reads  phi^d z - w = phi^k a.
    # In eigencoordinates the expanding part of phi^k a has norm between
    # |a_P| min(l^k) and |a_P| max(l^k) (increasing in k); the contracting
    # part behaves the same way but decreasing in k.  Every nonzero integer
    # vector has nonzero expanding and contracting parts.
    Vi = eig.inverse
    P, Qm = eig.expanding, ~eig.expanding
    logP = np.log(eig.values[P])
    logQ = np.log(eig.values[Qm])

    def parts(v):
        c = Vi @ np.asarray(v, dtype=float)
        return float(np.linalg.norm(c[P])), float(np.linalg.norm(c[Qm]))

    zP, zQ = parts(z)
    wP, wQ = parts(w)
    aP, aQ = parts(a)
    if min(zP, zQ, wP, wQ, aP, aQ) < 1e-12:
        raise PrecisionError("vector numerically inside an eigenspace")
    laP, laQ = math.log(aP), math.log(aQ)

    def kmin_P(t):
        # smallest k with |a_P| max(l^k) >= t
        if t <= 0:
            return -10 ** 6
        lt = math.log(t) - tol
        return _first_true(lambda k: laP + _log_env(logP, k)[1] >= lt)

    def kmax_P(t):
        # largest k with |a_P| min(l^k) <= t
        lt = math.log(t) + tol
        return _first_true(lambda k: laP + _log_env(logP, k)[0] > lt) - 1

    def kmax_Q(t):
        # largest k with |a_Q| max(l^k) >= t  (decreasing in k)
        if t <= 0:
            return 10 ** 6
        lt = math.log(t) - tol
        return _first_true(lambda k: laQ + _log_env(logQ, k)[1] < lt) - 1

    def kmin_Q(t):
        lt = math.log(t) + tol
        return _first_true(lambda k: laQ + _log_env(logQ, k)[0] <= lt)

    def excluded_beyond(d, step):
        # lower bounds on |u_P|, |u_Q| that only grow as d moves further in `step`
        if step > 0:
            LP = math.exp(_log_env(logP, d)[0]) * zP - wP
            LQ = wQ - math.exp(_log_env(logQ, d)[1]) * zQ
        else:
            LP = wP - math.exp(_log_env(logP, d)[1]) * zP
            LQ = math.exp(_log_env(logQ, d)[0]) * zQ - wQ
        if LP <= 0 or LQ <= 0:
            return False
        return kmin_P(LP * (1 - tol)) > kmax_Q(LQ * (1 - tol))

    bounds = {}
    for step in (1, -1):
        d = 0
        while not excluded_beyond(d, step):
            d += step
            if abs(d) > 10000:
                raise PrecisionError("intersection search failed to terminate")
        bounds[step] = d
    sols = []
    reach = max(abs(bounds[1]), abs(bounds[-1]))
    zd = {0: z}
    for d in range(1, bounds[1] + 1):
        zd[d] = M.apply(zd[d - 1])
    for d in range(-1, bounds[-1] - 1, -1):
        zd[d] = M.apply_inverse(zd[d + 1])
    for d in range(bounds[-1], bounds[1] + 1):
        u = tuple(x - y for x, y in zip(zd[d], w))
        if not any(u):
            continue
        uP, uQ = parts(u)
        if uP <= 0 or uQ <= 0:
            continue
        lo = max(kmin_P(uP), kmin_Q(uQ))
        hi = min(kmax_P(uP), kmax_Q(uQ))
        for k in range(lo, hi + 1):
            reach = max(reach, abs(k), abs(d - k))
            if _power_apply(M, k, a) == u:
                sols.append((d - k, -k))
    return sorted(set(sols)), reach



def _power_apply(M, k, v):
    v = tuple(v)
    if k >= 0:
        for _ in range(k):
            v = M.apply(v)
    else:
        for _ in range(-k):
            v = M.apply_inverse(v)
    return v


# ---------------------------------------------------------------------------
# separated pairs and packing bounds

def lattice_ball(D, n):
    """All integer vectors of Euclidean norm <= D, in lexicographic order."""
    D2 = Fraction(D) ** 2 if not isinstance(D, float) else Fraction(D) ** 2
    r = math.isqrt(int(D2)) if D2 >= 0 else -1
    out = []

    def rec(prefix, left):
        if len(prefix) == n:
            out.append(tuple(prefix))
            return
        m = math.isqrt(int(left)) if left >= 0 else -1
        for x in range(-m, m + 1):
            if x * x <= left:
                rec(prefix + [x], left - x * x)

    if r >= 0:
        rec([], D2)
    return out


def packing_bound_estimate(D, M):
    """N = 2 |S|^2 with S the integer points of the closed D-ball."""
    M = _as_auto(M)
    return 2 * len(lattice_ball(D, M.n)) ** 2


def packing_bound_details(D, M):
    M = _as_auto(M)
    count = len(lattice_ball(D, M.n))
    vol = math.pi ** (M.n / 2) / math.gamma(M.n / 2 + 1) * float(D) ** M.n
    return {"lattice_count": count, "N": 2 * count ** 2, "volume": vol,
            "volume_estimate": 2 * vol ** 2}


class WindowCertificate(NamedTuple):
    window: int
    tail_bound: int
    radius: float
    D: float


def certified_window(M, D, radius=None):
    """Smallest K with |phi^k v| > D for every nonzero integer v, |v| <= radius, |k| > K.

    Beyond ``tail_bound`` the inequality follows from eigenvalue growth; the
    range (K, tail_bound] is verified exhaustively with exact integers.
    """
    M = _as_auto(M)
    radius = 2 * D if radius is None else radius
    eig = hyperbolic_eigendata(M)
    vs = [v for v in lattice_ball(radius, M.n) if any(v)]
    smin = float(np.linalg.svd(eig.vectors, compute_uv=False)[-1])
    lamP = eig.values[eig.expanding]
    lamQ = eig.values[~eig.expanding]
    rate = min(float(lamP.min()), 1 / float(lamQ.max()))
    cmin = float("inf")
    for v in vs:
        c = eig.inverse @ np.asarray(v, dtype=float)
        cmin = min(cmin, np.linalg.norm(c[eig.expanding]), np.linalg.norm(c[~eig.expanding]))
    if not vs:
        return WindowCertificate(0, 0, radius, D)
    tail = 0
    while smin * cmin * rate ** (tail + 1) <= float(D) * (1 + 1e-9) + 1e-9:
        tail += 1
    D2 = Fraction(D) ** 2
    K = 0
    for v in vs:
        o = orbit(v, M, -tail, tail)
        for k in range(-tail, tail + 1):
            if sum(x * x for x in o.at(k)) <= D2:
                K = max(K, abs(k))
    return WindowCertificate(K, tail, radius, D)


class SeparatedPair(NamedTuple):
    pair: tuple
    window: int
    certified: bool


def separated_pair(points, D, M, window=None):
    """First pair (i, j), i < j, whose difference stays outside the D-ball along
    the orbit for |k| <= window.

    A difference v is close at some step iff v = phi^k s for a lattice point s
    of the closed D-ball, so the test is a set lookup.  With ``window=None``
    the window is certified for all k in Z.
    """
    M = _as_auto(M)
    pts = [tuple(int(x) for x in p) for p in points]
    if len(set(pts)) != len(pts):
        raise ValidationError("points must be pairwise distinct")
    certified = False
    if window is None:
        # pairwise distances are at most twice the largest norm;
        # phi^k s with |k| beyond the window has norm above that
        far = 2 * max(math.sqrt(sum(x * x for x in p)) for p in pts) if pts else 0.0
        window = certified_window_outer(M, D, far)
        certified = True
    close = set()
    for s in lattice_ball(D, M.n):
        if any(s):
            close.update(orbit(s, M, -window, window).points)
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            v = tuple(x - y for x, y in zip(pts[i], pts[j]))
            if v not in close:
                return SeparatedPair((i, j), window, certified)
    return SeparatedPair(None, window, certified)


def certified_window_outer(M, inner, outer, vectors=None):
    """Smallest K with |phi^k s| > outer for all |k| > K.

    ``s`` ranges over the nonzero integer vectors of norm <= inner, or over
    ``vectors`` when given.
    """
    M = _as_auto(M)
    eig = hyperbolic_eigendata(M)
    if vectors is None:
        vectors = lattice_ball(inner, M.n)
    vs = [tuple(v) for v in vectors if any(v)]
    if not vs:
        return 0
    smin = float(np.linalg.svd(eig.vectors, compute_uv=False)[-1])
    rate = min(float(eig.values[eig.expanding].min()),
               1 / float(eig.values[~eig.expanding].max()))
    C = eig.inverse @ np.array(vs, dtype=float).T
    cmin = float(min(np.linalg.norm(C[eig.expanding], axis=0).min(),
                     np.linalg.norm(C[~eig.expanding], axis=0).min()))
    # |phi^k s| >= smin * cmin * rate^|k|, so only |k| <= tail needs checking
    tail = 0
    while smin * cmin * rate ** (tail + 1) <= outer * (1 + 1e-9) + 1e-9:
        tail += 1
    o2 = outer * outer * (1 + 1e-12)
    K = 0
    for v in vs:
        o = orbit(v, M, -tail, tail)
        for k in range(-tail, tail + 1):
            if abs(k) > K and sum(x * x for x in o.at(k)) <= o2:
                K = abs(k)
    return K


# ---------------------------------------------------------------------------
# invariant lattice

def invariant_lattice(M):
    """Integer basis of Z^n meet (E_minus + E_plus), in Hermite normal form."""
    M = _as_auto(M)
    sp = spectrum(M)
    for r in sp.roots:
        if abs(r.value.imag) > r.radius or r.value.real <= 0:
            raise HypothesisViolation("eigenvalues must be real and positive",
                                      detail=complex(r.value))
    q = sympy.Poly(list(sp.charpoly), _X)
    one = sympy.Poly(_X - 1, _X)
    while q.rem(one).is_zero:
        q = q.quo(one)
    Q = _eval_poly_at_matrix([int(c) for c in q.all_coeffs()], M.rows)
    if not any(any(r) for r in Q):
        return [tuple(int(i == j) for j in range(M.n)) for i in range(M.n)]
    return il.hermite_rows(il.integer_kernel(Q))

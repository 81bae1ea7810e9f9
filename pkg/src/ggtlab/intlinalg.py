"""Exact integer and rational linear algebra on lists of Python ints.

Matrices are lists of rows.  Nothing here touches floating point, so all
results are exact regardless of entry size.
"""

from fractions import Fraction
from math import gcd


def identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def mat_mul(A, B):
    Bt = list(zip(*B))
    return [[sum(a * b for a, b in zip(row, col)) for col in Bt] for row in A]


def mat_vec(A, v):
    return tuple(sum(a * x for a, x in zip(row, v)) for row in A)


def mat_sub(A, B):
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def det_bareiss(A):
    """Fraction-free determinant of a square integer matrix."""
    n = len(A)
    if n == 0:
        return 1
    M = [list(r) for r in A]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k] != 0:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def rational_inverse(A):
    """Gauss-Jordan inverse over Q; raises ValueError if singular."""
    n = len(A)
    M = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(A)]
    for c in range(n):
        p = next((r for r in range(c, n) if M[r][c] != 0), None)
        if p is None:
            raise ValueError("singular matrix")
        M[c], M[p] = M[p], M[c]
        inv = 1 / M[c][c]
        M[c] = [x * inv for x in M[c]]
        for r in range(n):
            if r != c and M[r][c] != 0:
                f = M[r][c]
                M[r] = [x - f * y for x, y in zip(M[r], M[c])]
    return [row[n:] for row in M]


def rref(rows):
    """Reduced row echelon form over Q. Returns (rows, pivot columns)."""
    M = [[Fraction(x) for x in r] for r in rows]
    if not M:
        return [], []
    ncol = len(M[0])
    pivots = []
    r = 0
    for c in range(ncol):
        p = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        inv = 1 / M[r][c]
        M[r] = [x * inv for x in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == len(M):
            break
    return M[:r], pivots


def rank(rows):
    return len(rref(rows)[1])


def nullspace(rows, ncol=None):
    """Basis of {x : rows . x = 0} over Q."""
    if ncol is None:
        ncol = len(rows[0])
    R, piv = rref(rows) if rows else ([], [])
    free = [c for c in range(ncol) if c not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncol
        v[f] = Fraction(1)
        for row, p in zip(R, piv):
            v[p] = -row[f]
        basis.append(v)
    return basis


def in_span(v, basis):
    if not any(v):
        return True
    if not basis:
        return False
    return rank(list(basis) + [list(v)]) == rank(basis)


def primitive(v):
    """Scale a rational vector to a primitive integer vector."""
    den = 1
    for x in v:
        den = den * Fraction(x).denominator // gcd(den, Fraction(x).denominator)
    ints = [int(Fraction(x) * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        return tuple(ints)
    return tuple(x // g for x in ints)


def column_hermite(A):
    """Column-style reduction A U = [H | 0] with U unimodular.

    Returns (H columns as a matrix, U, rank).  Only the kernel part of U is
    used by callers, so H is not fully normalized.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    M = [list(r) for r in A]
    U = identity(n)
    col = 0
    for row in range(m):
        if col >= n:
            break
        # Euclid on entries M[row][col:] using column operations
        while True:
            nz = [j for j in range(col, n) if M[row][j] != 0]
            if not nz:
                break
            j0 = min(nz, key=lambda j: abs(M[row][j]))
            _swap_cols(M, U, col, j0)
            done = True
            for j in range(col + 1, n):
                if M[row][j] != 0:
                    q = M[row][j] // M[row][col]
                    _addmul_col(M, U, j, col, -q)
                    if M[row][j] != 0:
                        done = False
            if done:
                break
        if M[row][col] != 0:
            col += 1
    return M, U, col


def _swap_cols(M, U, a, b):
    if a == b:
        return
    for r in M:
        r[a], r[b] = r[b], r[a]
    for r in U:
        r[a], r[b] = r[b], r[a]


def _addmul_col(M, U, j, k, q):
    # column j += q * column k
    for r in M:
        r[j] += q * r[k]
    for r in U:
        r[j] += q * r[k]


def integer_kernel(A, n=None):
    """Z-basis of {x in Z^n : A x = 0}; the result is automatically saturated."""
    if not A:
        return [tuple(int(i == j) for j in range(n)) for i in range(n)]
    n = len(A[0])
    _, U, r = column_hermite(A)
    return [tuple(U[i][j] for i in range(n)) for j in range(r, n)]


def saturation(vectors, n):
    """Z-basis of Z^n intersected with the rational span of ``vectors``."""
    vectors = [v for v in vectors if any(v)]
    if not vectors:
        return []
    comp = nullspace([list(v) for v in vectors], n)
    if not comp:
        return [tuple(int(i == j) for j in range(n)) for i in range(n)]
    C = [list(primitive(c)) for c in comp]
    return hermite_rows(integer_kernel(C))


def hermite_rows(vectors):
    """Row Hermite normal form of the lattice spanned by integer vectors.

    Rows are returned top to bottom with strictly increasing pivot columns,
    positive pivots, and entries above each pivot reduced into [0, pivot).
    """
    rows = [list(v) for v in vectors if any(v)]
    if not rows:
        return []
    n = len(rows[0])
    out = []
    col = 0
    while rows and col < n:
        nz = [r for r in rows if r[col] != 0]
        if not nz:
            col += 1
            continue
        rest = [r for r in rows if r[col] == 0]
        while len(nz) > 1:
            nz.sort(key=lambda r: abs(r[col]))
            p = nz[0]
            new = [p]
            for r in nz[1:]:
                q = r[col] // p[col]
                r = [a - q * b for a, b in zip(r, p)]
                if r[col] != 0:
                    new.append(r)
                elif any(r):
                    rest.append(r)
            nz = new
        p = nz[0]
        if p[col] < 0:
            p = [-a for a in p]
        out.append((col, p))
        rows = rest
        col += 1
    # reduce entries above pivots
    for i in range(len(out)):
        ci, pi = out[i]
        for k in range(i):
            ck, pk = out[k]
            q = pk[ci] // pi[ci]
            if q:
                out[k] = (ck, [a - q * b for a, b in zip(pk, pi)])
    return [tuple(p) for _, p in out]


def lattice_reduce(v, hnf):
    """Canonical representative of v modulo the lattice with row HNF ``hnf``.

    Two integer vectors are congruent modulo the lattice iff their reduced
    forms are equal.
    """
    v = list(v)
    for row in hnf:
        c = next(i for i, a in enumerate(row) if a != 0)
        q = v[c] // row[c]
        if q:
            v = [a - q * b for a, b in zip(v, row)]
    return tuple(v)


def in_lattice(v, hnf):
    return not any(lattice_reduce(v, hnf))


def lattice_coordinates(v, basis):
    """Solve v = sum c_i basis_i over Q; returns None if v is not in the span."""
    if not basis:
        return [] if not any(v) else None
    n = len(v)
    k = len(basis)
    aug = [[Fraction(basis[j][i]) for j in range(k)] + [Fraction(v[i])] for i in range(n)]
    R, piv = rref(aug)
    if k in piv:
        return None
    sol = [Fraction(0)] * k
    for row, p in zip(R, piv):
        sol[p] = row[k]
    return sol

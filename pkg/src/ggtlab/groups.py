"""Normal forms, Cayley-graph balls and coset distances.

Four families are supported, each with a hashable normal form:

* ``FreeAbelian(n)``: integer tuples.
* ``FreeGroup(m)``: reduced words, stored as ``FreeWord`` (a tuple of signed
  generator indices, ``-i`` being the inverse of ``i``).
* ``PolyGroup(phi)``: the semidirect product of Z^n by Z where the generator
  t acts by ``phi``; elements ``PolyElement(z, k)`` stand for ``z t^k``.
* ``FreeTimesAbelian(m, n)``: pairs ``ProdElement(word, z)``.

Balls are enumerated breadth first with generators tried in their listed
order, so tables are deterministic.
"""

import re
from typing import NamedTuple

from . import intlinalg as il
from .errors import TruncationError, ValidationError

DEFAULT_CAP = 10 ** 7


# ---------------------------------------------------------------------------
# free words

class FreeWord(tuple):
    """Reduced word in a free group; letters are nonzero signed ints."""

    def __new__(cls, letters=()):
        out = []
        for x in letters:
            if x == 0:
                raise ValueError("letter 0 is not a generator")
            if out and out[-1] == -x:
                out.pop()
            else:
                out.append(x)
        return tuple.__new__(cls, out)

    @classmethod
    def _raw(cls, letters):
        return tuple.__new__(cls, letters)

    @classmethod
    def parse(cls, text):
        text = text.strip()
        if text in ("", "e", "1"):
            return cls()
        letters = []
        for ch in text:
            if "a" <= ch <= "z":
                letters.append(ord(ch) - ord("a") + 1)
            elif "A" <= ch <= "Z":
                letters.append(-(ord(ch) - ord("A") + 1))
            else:
                raise ValueError(f"bad letter {ch!r} in word {text!r}")
        return cls(letters)

    def __str__(self):
        if not self:
            return "e"
        return "".join(chr(ord("a") + x - 1) if x > 0 else chr(ord("A") - x - 1)
                       for x in self)

    def __repr__(self):
        return f"FreeWord({str(self)!r})"

    def __mul__(self, other):
        return free_mul(self, other)

    def inverse(self):
        return FreeWord._raw(tuple(-x for x in reversed(self)))


def free_mul(w1, w2):
    i = 0
    n1, n2 = len(w1), len(w2)
    while i < n1 and i < n2 and w1[n1 - 1 - i] == -w2[i]:
        i += 1
    return FreeWord._raw(tuple(w1[:n1 - i]) + tuple(w2[i:]))


def free_inv(w):
    return FreeWord._raw(tuple(-x for x in reversed(w)))


def same_axis(f, g):
    """Whether nontrivial words f, g translate along a common axis (fg == gf)."""
    f, g = FreeWord(f), FreeWord(g)
    if not f or not g:
        raise ValueError("same_axis needs nontrivial words")
    return free_mul(f, g) == free_mul(g, f)


# ---------------------------------------------------------------------------
# element types

class PolyElement(NamedTuple):
    z: tuple
    k: int


class ProdElement(NamedTuple):
    word: FreeWord
    z: tuple


def _vadd(u, v):
    return tuple(a + b for a, b in zip(u, v))


def _vneg(u):
    return tuple(-a for a in u)


def _parse_vec(text):
    text = text.strip().strip("()")
    if not text:
        return ()
    return tuple(int(x) for x in text.split(","))


class Group:
    """Common interface; subclasses fill in the arithmetic."""

    descriptor = "?"

    def mul(self, g, h):
        raise NotImplementedError

    def inv(self, g):
        raise NotImplementedError

    def default_generators(self):
        raise NotImplementedError

    def parse_element(self, text):
        raise NotImplementedError

    def format_element(self, g):
        return str(g)

    def power(self, g, k):
        if k < 0:
            g, k = self.inv(g), -k
        out = self.identity
        for _ in range(k):
            out = self.mul(out, g)
        return out

    def sort_key(self, g):
        return g

    def __eq__(self, other):
        return type(self) is type(other) and self.descriptor == other.descriptor

    def __hash__(self):
        return hash(self.descriptor)

    def __repr__(self):
        return f"<{type(self).__name__} {self.descriptor}>"


class FreeAbelian(Group):
    def __init__(self, n):
        self.n = n
        self.identity = (0,) * n
        self.descriptor = f"Zn:{n}"

    def mul(self, g, h):
        return _vadd(g, h)

    def inv(self, g):
        return _vneg(g)

    def power(self, g, k):
        return tuple(k * a for a in g)

    def default_generators(self):
        gens = []
        for i in range(self.n):
            e = tuple(int(j == i) for j in range(self.n))
            gens += [e, _vneg(e)]
        return gens

    def parse_element(self, text):
        v = _parse_vec(text)
        if len(v) != self.n:
            raise ValidationError(f"expected a vector of length {self.n}: {text!r}")
        return v

    def format_element(self, g):
        return ",".join(map(str, g))


class FreeGroup(Group):
    def __init__(self, m):
        self.m = m
        self.identity = FreeWord()
        self.descriptor = f"Fm:{m}"

    def mul(self, g, h):
        return free_mul(g, h)

    def inv(self, g):
        return free_inv(g)

    def default_generators(self):
        gens = []
        for i in range(1, self.m + 1):
            gens += [FreeWord._raw((i,)), FreeWord._raw((-i,))]
        return gens

    def parse_element(self, text):
        w = FreeWord.parse(text)
        if any(abs(x) > self.m for x in w):
            raise ValidationError(f"word {text!r} uses letters beyond rank {self.m}")
        return w

    def sort_key(self, g):
        return _shortlex(g)


def _shortlex(w):
    # a < A < b < B < ...
    return (len(w), tuple(2 * abs(x) - (x > 0) for x in w))


class PolyGroup(Group):
    """Z^n extended by t with t z t^-1 = phi(z)."""

    def __init__(self, phi):
        from .dynamics import IntAutomorphism
        if not isinstance(phi, IntAutomorphism):
            phi = IntAutomorphism(phi)
        self.phi = phi
        self.n = phi.n
        self.identity = PolyElement((0,) * self.n, 0)
        self.descriptor = f"poly:{self.n}:{phi.to_text()}"
        self._pow = {0: il.identity(self.n), 1: phi.rows, -1: phi.inverse_rows}

    def phi_power(self, k):
        P = self._pow.get(k)
        if P is None:
            step = 1 if k > 0 else -1
            j = k - step
            while j not in self._pow:
                j -= step
            P = self._pow[j]
            base = self._pow[step]
            while j != k:
                P = il.mat_mul(base, P)
                j += step
                self._pow[j] = P
        return P

    def act(self, k, z):
        """phi^k applied to z."""
        if k == 0:
            return tuple(z)
        return il.mat_vec(self.phi_power(k), z)

    def mul(self, g, h):
        return PolyElement(_vadd(g.z, self.act(g.k, h.z)), g.k + h.k)

    def inv(self, g):
        return PolyElement(_vneg(self.act(-g.k, g.z)), -g.k)

    def default_generators(self):
        gens = []
        zero = (0,) * self.n
        for i in range(self.n):
            e = tuple(int(j == i) for j in range(self.n))
            gens += [PolyElement(e, 0), PolyElement(_vneg(e), 0)]
        gens += [PolyElement(zero, 1), PolyElement(zero, -1)]
        return gens

    def parse_element(self, text):
        text = text.strip()
        if text in ("t", "T"):
            return PolyElement((0,) * self.n, 1 if text == "t" else -1)
        m = re.fullmatch(r"z=\(([^)]*)\)\s*;\s*k=(-?\d+)", text.replace(" ", ""))
        if not m:
            raise ValidationError(f"bad poly element literal {text!r}")
        z = _parse_vec(m.group(1))
        if len(z) != self.n:
            raise ValidationError(f"poly element needs {self.n} coordinates: {text!r}")
        return PolyElement(z, int(m.group(2)))

    def format_element(self, g):
        return f"z=({','.join(map(str, g.z))});k={g.k}"


class FreeTimesAbelian(Group):
    def __init__(self, m, n):
        self.m, self.n = m, n
        self.identity = ProdElement(FreeWord(), (0,) * n)
        self.descriptor = f"FmxZn:{m}:{n}"

    def mul(self, g, h):
        return ProdElement(free_mul(g.word, h.word), _vadd(g.z, h.z))

    def inv(self, g):
        return ProdElement(free_inv(g.word), _vneg(g.z))

    def power(self, g, k):
        w = FreeWord()
        base = g.word if k >= 0 else free_inv(g.word)
        for _ in range(abs(k)):
            w = free_mul(w, base)
        return ProdElement(w, tuple(k * a for a in g.z))

    def default_generators(self):
        gens = []
        zero = (0,) * self.n
        for i in range(1, self.m + 1):
            gens += [ProdElement(FreeWord._raw((i,)), zero),
                     ProdElement(FreeWord._raw((-i,)), zero)]
        for i in range(self.n):
            e = tuple(int(j == i) for j in range(self.n))
            gens += [ProdElement(FreeWord(), e), ProdElement(FreeWord(), _vneg(e))]
        return gens

    def parse_element(self, text):
        """Literal ``word`` or ``word|v1,...,vn``; ``e`` is the empty word."""
        text = text.strip()
        if "|" in text:
            wtext, vtext = text.split("|", 1)
            z = _parse_vec(vtext)
        else:
            wtext, z = text, (0,) * self.n
        w = FreeWord.parse(wtext)
        if any(abs(x) > self.m for x in w):
            raise ValidationError(f"word {wtext!r} uses letters beyond rank {self.m}")
        if len(z) != self.n:
            raise ValidationError(f"vector part of {text!r} must have length {self.n}")
        return ProdElement(w, z)

    def format_element(self, g):
        return f"{g.word}|{','.join(map(str, g.z))}"

    def sort_key(self, g):
        return (_shortlex(g.word), g.z)


def parse_group(descriptor):
    d = descriptor.strip()
    try:
        if d.startswith("Zn:"):
            return FreeAbelian(int(d[3:]))
        if d.startswith("Fm:"):
            return FreeGroup(int(d[3:]))
        if d.startswith("FmxZn:"):
            m, n = d[6:].split(":")
            return FreeTimesAbelian(int(m), int(n))
        if d.startswith("poly:"):
            n, mat = d[5:].split(":", 1)
            from .dynamics import parse_matrix
            G = PolyGroup(parse_matrix(mat.strip().strip('"')))
            if G.n != int(n):
                raise ValidationError(f"matrix size does not match n={n}")
            return G
    except ValueError as exc:
        raise ValidationError(f"bad group descriptor {descriptor!r}: {exc}") from exc
    raise ValidationError(f"unknown group descriptor {descriptor!r}")


def parse_generators(G, text):
    """Split a ';'-separated generator list (poly literals keep their ';k=')."""
    parts = [p for p in text.split(";")]
    tokens = []
    for p in parts:
        if p.strip().startswith("k=") and tokens:
            tokens[-1] += ";" + p
        elif p.strip():
            tokens.append(p)
    return [G.parse_element(t) for t in tokens]


# ---------------------------------------------------------------------------
# balls

class DistanceBall:
    """Exact word-metric distances from the identity up to ``radius``."""

    def __init__(self, group, generators, radius, dist, complete=True):
        self.group = group
        self.generators = generators
        self.radius = radius
        self.dist = dist
        self.complete = complete

    def __len__(self):
        return len(self.dist)

    def __contains__(self, g):
        return g in self.dist

    def distance(self, g):
        return self.dist.get(g)

    def elements(self):
        return list(self.dist)

    def sphere_sizes(self):
        sizes = [0] * (self.radius + 1)
        for d in self.dist.values():
            sizes[d] += 1
        return sizes

    def ball_sizes(self):
        out, acc = [], 0
        for s in self.sphere_sizes():
            acc += s
            out.append(acc)
        return out


def _symmetrize(G, gens):
    out = []
    for s in gens:
        if s not in out:
            out.append(s)
    for s in list(out):
        si = G.inv(s)
        if si not in out:
            out.append(si)
    return [s for s in out if s != G.identity]


def word_metric_ball(G, R, generators=None, cap=DEFAULT_CAP):
    """Breadth-first ball of radius R in the Cayley graph of G.

    Raises TruncationError (with the partial ball) when more than ``cap``
    elements would be stored.
    """
    if R < 0:
        raise ValidationError("radius must be nonnegative")
    gens = G.default_generators() if generators is None else _symmetrize(G, generators)
    mul = G.mul
    dist = {G.identity: 0}
    frontier = [G.identity]
    for d in range(1, R + 1):
        nxt = []
        for g in frontier:
            for s in gens:
                h = mul(g, s)
                if h not in dist:
                    dist[h] = d
                    nxt.append(h)
            if len(dist) > cap:
                partial = DistanceBall(G, gens, d - 1,
                                       {k: v for k, v in dist.items() if v < d}, False)
                raise TruncationError(f"ball cap {cap} exceeded at radius {d}",
                                      achieved_radius=d - 1, partial=partial)
        frontier = nxt
    return DistanceBall(G, gens, R, dist)


# ---------------------------------------------------------------------------
# subgroups of free groups (folded graphs give exact membership)

class FoldedGraph:
    """Stallings folding of the subgroup generated by the given words."""

    def __init__(self, words):
        edges = []
        nv = 1
        for w in words:
            w = FreeWord(w)
            if not w:
                continue
            v = 0
            for i, x in enumerate(w):
                if i == len(w) - 1:
                    u = 0
                else:
                    u = nv
                    nv += 1
                edges.append((v, x, u) if x > 0 else (u, -x, v))
                v = u
        parent = list(range(nv))

        def find(v):
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        changed = True
        while changed:
            changed = False
            out = {}
            for u, x, v in edges:
                u, v = find(u), find(v)
                for key, t in (((u, x), v), ((v, -x), u)):
                    s = out.get(key)
                    if s is None:
                        out[key] = t
                    elif find(s) != find(t):
                        parent[find(s)] = find(t)
                        changed = True
        self.root = find(0)
        self.delta = {}
        for u, x, v in edges:
            u, v = find(u), find(v)
            self.delta[(u, x)] = v
            self.delta[(v, -x)] = u
        self.vertices = len({find(v) for v in range(nv)})

    def contains(self, w):
        v = self.root
        for x in w:
            v = self.delta.get((v, x))
            if v is None:
                return False
        return v == self.root


# ---------------------------------------------------------------------------
# subgroups and cosets

class Subgroup:
    """A finitely generated subgroup H of G with the best available coset test.

    ``coset_key`` returns a canonical label of gH when an exact test exists
    for this (G, H) shape, and None otherwise.  ``contains`` is exact when a
    key or a folded graph is available and a bounded H-ball search otherwise.
    """

    def __init__(self, G, generators, search_radius=None):
        self.G = G
        self.generators = [g for g in generators if g != G.identity]
        self.search_radius = search_radius
        self._ball = {}
        self.kind = None
        self._key = self._exact_key()
        self.exact = self._key is not None or isinstance(G, FreeGroup)
        self._folded = FoldedGraph(self.generators) if isinstance(G, FreeGroup) else None

    # exact shapes ---------------------------------------------------------
    def _exact_key(self):
        G, gens = self.G, self.generators
        if not gens:
            self.kind = "trivial"
            return lambda g: g
        defaults = set(G.default_generators())
        if defaults <= set(_symmetrize(G, gens)):
            self.kind = "whole"
            return lambda g: 0
        if isinstance(G, FreeAbelian):
            hnf = il.hermite_rows(gens)
            self.kind = "normal"
            return lambda g: il.lattice_reduce(g, hnf)
        if isinstance(G, PolyGroup):
            if all(g.k == 0 for g in gens):
                hnf = il.hermite_rows([g.z for g in gens])
                if _phi_stable(G, hnf):
                    self.kind = "normal"
                    return lambda g: (il.lattice_reduce(g.z, hnf), g.k)
            zero = (0,) * G.n
            if all(g.z == zero for g in gens):
                step = 0
                for g in gens:
                    step = _gcd(step, g.k)
                if step == 1:
                    self.kind = "poly-t"
                    return lambda g: g.z
        if isinstance(G, FreeTimesAbelian):
            if all(not g.word for g in gens):
                hnf = il.hermite_rows([g.z for g in gens])
                self.kind = "normal"
                return lambda g: (g.word, il.lattice_reduce(g.z, hnf))
            pure = {g.word[0] for g in gens if len(g.word) == 1 and not any(g.z)}
            if all(x in pure or -x in pure for x in range(1, G.m + 1)):
                # H contains F_m x {0}, so H = F_m x L with L spanned by all z parts
                hnf = il.hermite_rows([g.z for g in gens])
                self.kind = "normal"
                return lambda g: il.lattice_reduce(g.z, hnf)
        return None

    def coset_key(self, g):
        return None if self._key is None else self._key(g)

    # membership -------------------------------------------------------------
    def ball(self, L):
        """All elements of H with H-word length <= L (H's own generators)."""
        if L not in self._ball:
            self._ball[L] = word_metric_ball(self.G, L, self.generators).dist
        return self._ball[L]

    def contains(self, g, L=None):
        """True/False when decided exactly, else True if found in the H-ball and None."""
        if self._key is not None:
            return self._key(g) == self._key(self.G.identity)
        if self._folded is not None:
            return self._folded.contains(g)
        L = self.search_radius if L is None else L
        if g in self.ball(L):
            return True
        return None

    def same_coset(self, a, b, L=None):
        if self._key is not None:
            return self._key(a) == self._key(b)
        return self.contains(self.G.mul(self.G.inv(a), b), L)


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return abs(a)


def _phi_stable(G, hnf):
    for sign in (1, -1):
        for row in hnf:
            if not il.in_lattice(G.act(sign, row), hnf):
                return False
    return True


class CosetFamily(NamedTuple):
    generators: list
    representatives: list
    certified: list       # True, or "unconfirmed-distinct"
    certificate_radius: int


def coset_enumerate(G, H_generators, R, ball=None, subgroup=None):
    """One representative per coset gH meeting the radius-R ball."""
    H = subgroup or Subgroup(G, H_generators, search_radius=2 * R)
    if ball is None:
        ball = word_metric_ball(G, R)
    reps, flags = [], []
    if H._key is not None:
        seen = set()
        for g in ball.dist:
            k = H._key(g)
            if k not in seen:
                seen.add(k)
                reps.append(g)
                flags.append(True)
        return CosetFamily(H.generators, reps, flags, R)
    exact = H._folded is not None
    for g in ball.dist:
        new = True
        for r in reps:
            if H.same_coset(r, g, 2 * R):
                new = False
                break
        if new:
            reps.append(g)
            flags.append(True if exact else "unconfirmed-distinct")
    return CosetFamily(H.generators, reps, flags, 2 * R)


def coset_distance(G, a, b, H_generators, R, ball=None, subgroup=None, h_radius=None):
    """Distance between cosets aH and bH if it is at most R, else the string '>=R'.

    Minimizes |s| over s in the radius-R ball with a h s in bH for h in an
    H-ball; every witness is genuine, so a returned number is exact whenever
    the minimizing h lies in the searched H-ball.
    """
    H = subgroup or Subgroup(G, H_generators, search_radius=2 * R)
    if ball is None:
        ball = word_metric_ball(G, R)
    L = 2 * R if h_radius is None else h_radius
    hs = list(H.ball(L))
    target = H.coset_key(b)
    by_level = {}
    for s, d in ball.dist.items():
        by_level.setdefault(d, []).append(s)
    mul = G.mul
    for d in range(R + 1):
        for s in by_level.get(d, ()):
            for h in hs:
                x = mul(mul(a, h), s)
                if target is not None:
                    if H._key(x) == target:
                        return d
                elif H.same_coset(x, b, L):
                    return d
    return f">={R}"

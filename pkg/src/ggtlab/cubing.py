"""Truncated Sageev cubings built from almost invariant sets on a Cayley ball.

A half-space is a translate gA or its complement, recorded as a bitset over
the vertices of the ball B(R) listed in breadth-first order.  Translates are
taken for g in the inner ball B(R - margin), and A itself is computed on a
ball large enough that g^-1 x stays inside it for every recorded g and x.

Vertices of the cubing are orientations: one side chosen from every
complementary pair, stored as an int whose bit p says whether the first side
of pair p was chosen.
"""

from collections import deque
from dataclasses import dataclass, field
from itertools import combinations

from . import groups as gr
from .cliques import max_clique
from .errors import GgtError, NoCodimensionOneEvidence, NotMinimalError, TruncationError, \
    ValidationError

VERTEX_CAP = 10 ** 5
NESTED, CROSSING, AMBIGUOUS = "nested", "crossing", "truncation-ambiguous"


def _gens(G, H_generators):
    return [G.parse_element(g) if isinstance(g, str) else g for g in H_generators]


@dataclass
class AlmostInvariantSet:
    group: object
    subgroup: list
    nu: int
    radius: int
    members: frozenset          # A inside the ball
    neighbourhood: frozenset    # the nu-neighbourhood of H inside the ball
    deep_components: list       # (first deep vertex, size), in discovery order
    chosen: int


def _neighbourhood(G, H, ball, nu):
    short = [g for g, d in ball.dist.items() if d <= nu]
    return frozenset(g for g in ball.dist if any(H.contains(G.mul(g, s)) for s in short))


def almost_invariant_set(G, H_generators, nu, R):
    """A = one deep component of B(R) minus the nu-neighbourhood of H.

    A component is deep when it contains a vertex at distance more than
    nu + 2 from H.  The chosen component is the one containing the deep
    vertex met first in breadth-first order.
    """
    if nu < 0 or R < 1:
        raise ValidationError("need nu >= 0 and R >= 1")
    gens = _gens(G, H_generators)
    H = gr.Subgroup(G, gens, search_radius=2 * R)
    ball = gr.word_metric_ball(G, R)
    steps = ball.generators
    N = _neighbourhood(G, H, ball, nu)
    # distance to H inside the ball, by multi-source search
    dist = {g: 0 for g in ball.dist if H.contains(g)}
    queue = deque(g for g in ball.dist if g in dist)
    while queue:
        g = queue.popleft()
        for s in steps:
            h = G.mul(g, s)
            if h in ball.dist and h not in dist:
                dist[h] = dist[g] + 1
                queue.append(h)
    comp = {}
    comps = []
    for g in ball.dist:
        if g in N or g in comp:
            continue
        idx = len(comps)
        members = [g]
        comp[g] = idx
        queue = deque([g])
        while queue:
            x = queue.popleft()
            for s in steps:
                y = G.mul(x, s)
                if y in ball.dist and y not in N and y not in comp:
                    comp[y] = idx
                    members.append(y)
                    queue.append(y)
        comps.append(members)
    deep = []
    for g in ball.dist:
        if g in comp and dist.get(g, R + nu + 3) > nu + 2:
            c = comp[g]
            if all(c != d for d, _ in deep):
                deep.append((c, g))
    if len(deep) < 2:
        raise NoCodimensionOneEvidence("no codimension-1 evidence at this truncation")
    chosen = deep[0][0]
    return AlmostInvariantSet(G, gens, nu, R, frozenset(comps[chosen]), N,
                              [(G.format_element(g), len(comps[c])) for c, g in deep], 0)


@dataclass(frozen=True)
class HalfSpace:
    id: int
    translate: object
    base: int
    complement_side: bool
    bits: int


class SigmaSystem:
    """Deduplicated half-spaces gA, gA^c for g in the inner ball, over B(R)."""

    def __init__(self, G, bases, R, margin):
        self.group, self.bases, self.radius, self.margin = G, bases, R, margin
        self.inner_radius = R - margin
        if self.inner_radius < 0:
            raise ValidationError("margin exceeds the radius")
        for b in bases:
            if b.radius < self.inner_radius + R:
                raise ValidationError("base set computed on too small a ball")
        ball = gr.word_metric_ball(G, R)
        self.vertices = list(ball.dist)
        self.index = {g: i for i, g in enumerate(self.vertices)}
        self.full = (1 << len(self.vertices)) - 1
        self.inner_mask = sum(1 << i for i, g in enumerate(self.vertices)
                              if ball.dist[g] <= R - 1)
        self.halfspaces, self.pairs, self.translates = [], [], []
        seen = {}
        for bi, base in enumerate(bases):
            for g in (g for g, d in ball.dist.items() if d <= self.inner_radius):
                bits = self._translate_bits(g, base.members)
                pid = None
                if bits in seen:
                    pid = seen[bits] // 2
                elif bits and bits != self.full:
                    pid = len(self.pairs)
                    for side, b in ((False, bits), (True, self.full ^ bits)):
                        hs = HalfSpace(len(self.halfspaces), g, bi, side, b)
                        self.halfspaces.append(hs)
                        seen[b] = hs.id
                    self.pairs.append((2 * pid, 2 * pid + 1))
                self.translates.append((g, bi, pid))
        n = len(self.halfspaces)
        bits = [h.bits for h in self.halfspaces]
        self.subsets = [[j for j in range(n) if j != i and bits[j] & ~bits[i] == 0]
                        for i in range(n)]
        self.supersets = [[j for j in range(n) if j != i and bits[i] & ~bits[j] == 0]
                          for i in range(n)]

    def _translate_bits(self, g, members):
        G = self.group
        gi = G.inv(g)
        out = 0
        for i, x in enumerate(self.vertices):
            if G.mul(gi, x) in members:
                out |= 1 << i
        return out

    def complement(self, hid):
        return hid ^ 1

    def side_chosen(self, mask, hid):
        bit = (mask >> (hid // 2)) & 1
        return bit == (1 if hid % 2 == 0 else 0)

    def chosen(self, mask):
        return [2 * p + (0 if (mask >> p) & 1 else 1) for p in range(len(self.pairs))]

    def contains(self, a, b):
        """Whether half-space a is inside half-space b on the ball."""
        return self.halfspaces[a].bits & ~self.halfspaces[b].bits == 0


def sigma_system(G, H_generators, nu, R, margin=None, extra=()):
    """Half-space system of the almost invariant set of H, plus one family
    per subgroup in ``extra``."""
    margin = 2 * nu + 2 if margin is None else margin
    if isinstance(G, str):
        G = gr.parse_group(G)
    bases = [almost_invariant_set(G, H, nu, 2 * R - margin) for H in [H_generators, *extra]]
    return SigmaSystem(G, bases, R, margin)


def _nested_on(x, y, mask, full):
    xc, yc = full ^ x, full ^ y
    return any((p & q & mask) == 0 for p, q in ((x, y), (x, yc), (xc, y), (xc, yc)))


def is_nested(system, a, b):
    a = a.id if isinstance(a, HalfSpace) else a
    b = b.id if isinstance(b, HalfSpace) else b
    x, y = system.halfspaces[a].bits, system.halfspaces[b].bits
    if _nested_on(x, y, system.full, system.full):
        return NESTED
    if _nested_on(x, y, system.inner_mask, system.full):
        return AMBIGUOUS
    return CROSSING


@dataclass
class WidthEstimate:
    width: int
    lower_bound: bool
    family: list                # pair ids of a largest crossing family found


def width_estimate(system, cap=8):
    """Largest pairwise crossing family of complementary pairs, up to ``cap``."""
    P = len(system.pairs)
    adj = {p: set() for p in range(P)}
    for p in range(P):
        for q in range(p + 1, P):
            if is_nested(system, 2 * p, 2 * q) == CROSSING:
                adj[p].add(q)
                adj[q].add(p)
    if not P:
        return WidthEstimate(0, False, [])
    res = max_clique(adj)
    fam = sorted(res.clique)
    if len(fam) >= cap:
        return WidthEstimate(cap, True, fam[:cap])
    return WidthEstimate(len(fam), not res.exact, fam)


def basic_vertices(system):
    """Orientations V_g = {half-spaces containing g} for g in the ball."""
    out = set()
    for i in range(len(system.vertices)):
        mask = 0
        for p, (a, _) in enumerate(system.pairs):
            if (system.halfspaces[a].bits >> i) & 1:
                mask |= 1 << p
        out.add(mask)
    return sorted(out)


def is_minimal(system, mask, hid):
    return not any(system.side_chosen(mask, j) for j in system.subsets[hid])


def check_vertex(system, mask):
    """Upward closure of an orientation on the truncated inclusion order."""
    for hid in system.chosen(mask):
        for j in system.supersets[hid]:
            if not system.side_chosen(mask, j):
                return False
    return True


def vertex_flip(system, mask, hid):
    """(V; A): swap A for its complement, allowed when A is minimal in V."""
    if not system.side_chosen(mask, hid):
        raise ValidationError(f"half-space {hid} is not chosen by this vertex")
    for j in system.subsets[hid]:
        if system.side_chosen(mask, j):
            raise NotMinimalError(f"half-space {hid} is not minimal", witness=j)
    return mask ^ (1 << (hid // 2))


def _minimal_chosen(system, mask):
    return [h for h in system.chosen(mask) if is_minimal(system, mask, h)]


@dataclass
class CubeComplex:
    system: SigmaSystem
    vertices: list
    edges: list                 # (u, v, pair id) with u < v
    cubes: dict                 # dimension -> sorted (fixed mask, pair mask)
    dimension: int
    basic: list
    basic_connected: bool
    opposite_violations: int
    boundary_violations: int

    def to_json(self):
        P = len(self.system.pairs)
        fmt = lambda m: format(m, f"0{P}b")[::-1] if P else ""
        return {"pairs": P, "vertices": [fmt(v) for v in self.vertices],
                "edges": [[fmt(u), fmt(v), p] for u, v, p in self.edges],
                "cubes": {str(k): [[fmt(a), fmt(b)] for a, b in v]
                          for k, v in sorted(self.cubes.items())},
                "dimension": self.dimension}

    def to_dot(self):
        P = len(self.system.pairs)
        fmt = lambda m: format(m, f"0{P}b")[::-1] if P else "v"
        lines = ["graph cubing {"]
        lines += [f'  "{fmt(v)}";' for v in self.vertices]
        lines += [f'  "{fmt(u)}" -- "{fmt(v)}" [label={p}];' for u, v, p in self.edges]
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_cubing(system, vertex_cap=VERTEX_CAP, max_dim=8):
    basic = basic_vertices(system)
    if len(basic) > vertex_cap:
        raise TruncationError(f"vertex cap {vertex_cap} reached", partial=basic[:vertex_cap])
    seen = set(basic)
    order = list(basic)
    queue = deque(basic)
    edges = set()
    while queue:
        v = queue.popleft()
        for h in _minimal_chosen(system, v):
            w = v ^ (1 << (h // 2))
            edges.add((min(v, w), max(v, w), h // 2))
            if w not in seen:
                if len(seen) >= vertex_cap:
                    raise TruncationError(f"vertex cap {vertex_cap} reached",
                                          partial=sorted(seen))
                seen.add(w)
                order.append(w)
                queue.append(w)
    vertices = sorted(seen)
    # connectivity of the basic vertices inside the flip graph
    adj = {v: [] for v in vertices}
    for u, w, _ in edges:
        adj[u].append(w)
        adj[w].append(u)
    reach = {basic[0]}
    queue = deque([basic[0]])
    while queue:
        v = queue.popleft()
        for w in adj[v]:
            if w not in reach:
                reach.add(w)
                queue.append(w)
    basic_connected = all(b in reach for b in basic)
    cubes = {}
    opposite_bad = boundary_bad = 0
    vset = seen
    for v in vertices:
        mins = _minimal_chosen(system, v)
        ok = lambda i, j: not system.contains(i ^ 1, j) and not system.contains(j ^ 1, i)
        for k in range(2, max_dim + 1):
            found = False
            for S in combinations(mins, k):
                if not all(ok(i, j) for i, j in combinations(S, 2)):
                    continue
                found = True
                smask = sum(1 << (h // 2) for h in S)
                key = (v & ~smask, smask)
                if key in cubes.setdefault(k, set()):
                    continue
                cubes[k].add(key)
                # opposite corner by successive flips
                w = v
                try:
                    for h in S:
                        w = vertex_flip(system, w, h)
                except NotMinimalError:
                    opposite_bad += 1
                    continue
                if w != v ^ smask:
                    opposite_bad += 1
                bits = [1 << (h // 2) for h in S]
                for r in range(k + 1):
                    for sub in combinations(bits, r):
                        if v ^ sum(sub) not in vset:
                            boundary_bad += 1
            if not found:
                break
    cubes = {k: sorted(c) for k, c in cubes.items() if c}
    dim = max(cubes) if cubes else (1 if edges else 0)
    return CubeComplex(system, vertices, sorted(edges), cubes, dim, basic, basic_connected,
                       opposite_bad, boundary_bad)


@dataclass
class HyperplaneReport:
    pair: int
    components: int
    boundary: bool


def hyperplane_components(cx, pair):
    """Components of the 1-skeleton after deleting the edges dual to ``pair``."""
    dual = [e for e in cx.edges if e[2] == pair]
    if not dual:
        raise GgtError(f"hyperplane {pair} has no dual edges in this truncation")
    parent = {v: v for v in cx.vertices}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for u, w, p in cx.edges:
        if p != pair:
            parent[find(u)] = find(w)
    comps = len({find(v) for v in cx.vertices})
    sysm = cx.system
    g = sysm.halfspaces[sysm.pairs[pair][0]].translate
    G = sysm.group
    depth = gr.word_metric_ball(G, sysm.inner_radius).distance(g)
    return HyperplaneReport(pair, comps, depth >= sysm.inner_radius)


@dataclass
class SeparationReport:
    checked: int
    nested: int
    ambiguous: int
    violations: int
    violating: list = field(default_factory=list)


def separation_to_nestedness_check(system, base=0):
    """For translates g with g N(H) disjoint from N(H), gA and A must not cross."""
    b = system.bases[base]
    N_bits = system._translate_bits(system.group.identity, b.neighbourhood)
    ident = next(pid for g, bi, pid in system.translates
                 if bi == base and g == system.group.identity)
    rep = SeparationReport(0, 0, 0, 0)
    if ident is None:
        return rep
    for g, bi, pid in system.translates:
        if bi != base or pid is None:
            continue
        gN = system._translate_bits(g, b.neighbourhood)
        if gN & N_bits:
            continue
        rep.checked += 1
        verdict = is_nested(system, 2 * pid, 2 * ident)
        if verdict == NESTED:
            rep.nested += 1
        elif verdict == AMBIGUOUS:
            rep.ambiguous += 1
        else:
            rep.violations += 1
            rep.violating.append(system.group.format_element(g))
    return rep

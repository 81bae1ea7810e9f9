"""Maximum clique search on small undirected graphs.

Graphs are dicts mapping a vertex to the set of its neighbours.  The exact
search splits the graph along a degeneracy ordering and runs a colouring
bounded branch and bound on each piece; a piece larger than ``exact_limit``
vertices is handled by a greedy clique improved by 1-swaps and 3-swaps.
"""

from itertools import combinations
from typing import NamedTuple


class CliqueResult(NamedTuple):
    clique: list
    exact: bool


def degeneracy_order(adj):
    deg = {v: len(adj[v]) for v in adj}
    buckets = {}
    for v, d in deg.items():
        buckets.setdefault(d, set()).add(v)
    order, done = [], set()
    while len(order) < len(adj):
        d = min(k for k, b in buckets.items() if b)
        v = min(buckets[d], key=repr)
        buckets[d].discard(v)
        order.append(v)
        done.add(v)
        for u in adj[v]:
            if u not in done:
                buckets[deg[u]].discard(u)
                deg[u] -= 1
                buckets.setdefault(deg[u], set()).add(u)
    return order


def _colour_bound(cand, adj):
    # greedy sequential colouring; returns vertices with their colour number
    colours = []
    out = []
    for v in cand:
        for i, cls in enumerate(colours):
            if not (adj[v] & cls):
                cls.add(v)
                out.append((v, i + 1))
                break
        else:
            colours.append({v})
            out.append((v, len(colours)))
    out.sort(key=lambda vc: vc[1])
    return out


def _expand(clique, cand, adj, best, budget):
    budget[0] -= 1
    if budget[0] < 0:
        return
    coloured = _colour_bound(cand, adj)
    while coloured:
        v, c = coloured.pop()
        if len(clique) + c <= len(best[0]):
            return
        new = [u for u in cand if u in adj[v]]
        clique.append(v)
        if not new:
            if len(clique) > len(best[0]):
                best[0] = list(clique)
        else:
            _expand(clique, new, adj, best, budget)
        clique.pop()
        cand = [u for u in cand if u != v]


def exact_max_clique(adj, vertices=None, lower=(), budget=10 ** 6):
    """Exact maximum clique inside ``vertices``; None if the node budget runs out."""
    cand = list(adj if vertices is None else vertices)
    best = [list(lower)]
    box = [budget]
    _expand([], cand, adj, best, box)
    return None if box[0] < 0 else best[0]


def greedy_clique(adj, vertices):
    vs = set(vertices)
    best = []
    for start in sorted(vs, key=lambda v: -len(adj[v] & vs)):
        clique = [start]
        cand = adj[start] & vs
        while cand:
            v = max(sorted(cand, key=repr), key=lambda u: len(adj[u] & cand))
            clique.append(v)
            cand &= adj[v]
        if len(clique) > len(best):
            best = clique
    return _swap_improve(adj, vs, best)


def _swap_improve(adj, vs, clique):
    # try removing up to 3 clique members and adding more than were removed
    improved = True
    clique = list(clique)
    while improved:
        improved = False
        for k in (1, 2, 3):
            for drop in combinations(clique, k):
                keep = [v for v in clique if v not in drop]
                cand = set(vs)
                for v in keep:
                    cand &= adj[v]
                cand -= set(clique)
                if len(cand) <= k:
                    continue
                extra = exact_max_clique(adj, cand, budget=10 ** 4) or []
                if len(extra) > k:
                    clique = keep + extra
                    improved = True
                    break
            if improved:
                break
    return clique


def max_clique(adj, exact_limit=25):
    if not adj:
        return CliqueResult([], True)
    order = degeneracy_order(adj)
    pos = {v: i for i, v in enumerate(order)}
    best = [order[0]]
    exact = True
    for v in order:
        later = [u for u in adj[v] if pos[u] > pos[v]]
        if len(later) + 1 <= len(best):
            continue
        if len(later) <= exact_limit:
            c = exact_max_clique(adj, later)
        else:
            c = exact_max_clique(adj, later, budget=10 ** 5)
            if c is None:
                exact = False
                c = greedy_clique(adj, later)
        if len(c) + 1 > len(best):
            best = [v] + list(c)
    return CliqueResult(best, exact)

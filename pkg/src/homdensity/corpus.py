"""Exhaustive small-graph corpora (one representative per isomorphism class)."""

from __future__ import annotations

from functools import lru_cache

import networkx as nx

from .graph import Graph, PatternGraph, as_pattern, build_graph
from .generators import is_bipartite


def _from_nx(g: nx.Graph) -> Graph:
    index = {v: i for i, v in enumerate(sorted(g.nodes))}
    return build_graph(len(index), [(index[u], index[v]) for u, v in g.edges])


@lru_cache(maxsize=None)
def all_graphs(max_n: int, min_n: int = 1) -> tuple[Graph, ...]:
    """Every graph on min_n..max_n vertices up to isomorphism (max_n <= 7)."""
    if max_n > 7:
        raise ValueError("the graph atlas stops at 7 vertices")
    return tuple(_from_nx(g) for g in nx.graph_atlas_g()
                 if min_n <= g.number_of_nodes() <= max_n)


@lru_cache(maxsize=None)
def bipartite_patterns(max_n: int, connected: bool = True) -> tuple[PatternGraph, ...]:
    """Bipartite graphs with at least one edge, 2-coloured per component."""
    out = []
    for g in all_graphs(max_n, 2):
        if g.edge_count == 0 or not is_bipartite(g):
            continue
        if connected and len(g.components()) != 1:
            continue
        out.append(as_pattern(g))
    return tuple(out)


def _to_nx(g: Graph) -> nx.Graph:
    out = nx.Graph()
    out.add_nodes_from(range(g.n))
    out.add_edges_from(g.edges)
    return out


def _dedupe(graphs) -> list[Graph]:
    buckets: dict[str, list[nx.Graph]] = {}
    reps = []
    for g in graphs:
        ng = _to_nx(g)
        key = nx.weisfeiler_lehman_graph_hash(ng)
        bucket = buckets.setdefault(key, [])
        if any(nx.is_isomorphic(ng, other) for other in bucket):
            continue
        bucket.append(ng)
        reps.append(g)
    return reps


def _labelled_regular(n: int, d: int):
    """Labelled d-regular graphs on n vertices with N(0) = {1..d}.

    Every isomorphism class has such a labelling, so this covers all classes.
    """
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    deg = [0] * n
    chosen: list[tuple[int, int]] = []

    def rec(i: int):
        # vertex u must be saturated once all pairs starting at u are decided
        if i == len(pairs):
            if all(x == d for x in deg):
                yield list(chosen)
            return
        u, v = pairs[i]
        remaining_u = n - 1 - v
        if u == 0:
            forced = v <= d
            if forced:
                deg[0] += 1
                deg[v] += 1
                chosen.append((0, v))
                yield from rec(i + 1)
                chosen.pop()
                deg[0] -= 1
                deg[v] -= 1
            else:
                yield from rec(i + 1)
            return
        if deg[u] < d and deg[v] < d:
            deg[u] += 1
            deg[v] += 1
            chosen.append((u, v))
            yield from rec(i + 1)
            chosen.pop()
            deg[u] -= 1
            deg[v] -= 1
        if deg[u] + remaining_u >= d:
            yield from rec(i + 1)

    yield from rec(0)


@lru_cache(maxsize=None)
def regular_graphs(n: int, d: int) -> tuple[Graph, ...]:
    """All d-regular graphs on n vertices up to isomorphism.

    Degrees above (n-1)/2 are obtained as complements to keep the search small.
    """
    if n * d % 2 or d >= n:
        return ()
    if 2 * d > n - 1:
        return tuple(g.complement() for g in regular_graphs(n, n - 1 - d))
    labelled = (build_graph(n, edges) for edges in _labelled_regular(n, d))
    return tuple(_dedupe(labelled))


def all_regular_graphs(max_n: int) -> tuple[Graph, ...]:
    return tuple(g for n in range(1, max_n + 1) for d in range(n) for g in regular_graphs(n, d))

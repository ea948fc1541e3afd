"""Exact tree decompositions of small patterns via elimination orders.

The width of an elimination order is the largest number of not-yet-eliminated
vertices a vertex is connected to, at its elimination time, through already
eliminated vertices.  Minimising over all orders gives the treewidth; the
subset recursion below (Bodlaender et al., 2006) does this in O*(2^n).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .graph import Graph, bits

EXACT_LIMIT = 12


@dataclass(frozen=True)
class TreeDecomposition:
    order: tuple[int, ...]
    width: int
    # bags[i] is order[i] together with its higher neighbours in the fill graph
    bags: tuple[frozenset[int], ...]
    exact: bool


def _q_mask(rows: tuple[int, ...], eliminated: int, v: int) -> int:
    """Vertices outside ``eliminated | {v}`` reachable from v through ``eliminated``."""
    seen = 1 << v
    frontier = 1 << v
    reach = 0
    while frontier:
        nxt = 0
        for x in bits(frontier):
            nxt |= rows[x]
        nxt &= ~seen
        seen |= nxt
        reach |= nxt & ~eliminated
        frontier = nxt & eliminated
    return reach


@lru_cache(maxsize=4096)
def _optimal_order(n: int, rows: tuple[int, ...]) -> tuple[tuple[int, ...], int]:
    full = (1 << n) - 1
    # best[S] = (width of best order eliminating S first, last vertex chosen)
    best = {0: (-1, -1)}
    for size in range(1, n + 1):
        layer = {}
        for s_prev, (w_prev, _) in best.items():
            if s_prev.bit_count() != size - 1:
                continue
            for v in bits(full & ~s_prev):
                s = s_prev | 1 << v
                w = max(w_prev, _q_mask(rows, s_prev, v).bit_count())
                cur = layer.get(s)
                if cur is None or w < cur[0] or (w == cur[0] and v < cur[1]):
                    layer[s] = (w, v)
        best.update(layer)
    order = []
    s = full
    while s:
        v = best[s][1]
        order.append(v)
        s &= ~(1 << v)
    order.reverse()
    return tuple(order), max(best[full][0], 0)


def _greedy_order(n: int, rows: tuple[int, ...]) -> tuple[int, ...]:
    adj = [set(bits(r)) for r in rows]
    alive = set(range(n))
    order = []
    while alive:
        v = min(alive, key=lambda x: (len(adj[x] & alive), x))
        nb = adj[v] & alive
        for a in nb:
            adj[a] |= nb - {a}
        alive.remove(v)
        order.append(v)
    return tuple(order)


def decompose(h: Graph) -> TreeDecomposition:
    if h.n <= EXACT_LIMIT:
        order, _ = _optimal_order(h.n, h.rows)
        exact = True
    else:
        order = _greedy_order(h.n, h.rows)
        exact = False
    bags = []
    eliminated = 0
    w = 0
    for v in order:
        q = _q_mask(h.rows, eliminated, v)
        bags.append(frozenset(bits(q)) | {v})
        w = max(w, q.bit_count())
        eliminated |= 1 << v
    return TreeDecomposition(order, w, tuple(bags), exact)

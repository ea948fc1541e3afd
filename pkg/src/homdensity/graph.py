"""Simple graphs, bipartite patterns and their structural invariants.

Adjacency is stored row-wise as Python ``int`` bitsets: bit ``v`` of
``rows[u]`` is set iff ``u ~ v``.  Common neighbourhoods are ANDs of rows,
set sizes are popcounts.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

DEFAULT_VERTEX_BUDGET = 100_000


class GraphError(ValueError):
    """Malformed graph input or an impossible structural request."""


class BudgetError(GraphError):
    """A construction would exceed a configured size budget."""


def bits(mask: int) -> list[int]:
    """Indices of the set bits of ``mask``, ascending."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


@dataclass(frozen=True, eq=False)
class Graph:
    n: int
    rows: tuple[int, ...]

    def __post_init__(self):
        if len(self.rows) != self.n:
            raise GraphError(f"expected {self.n} adjacency rows, got {len(self.rows)}")
        full = (1 << self.n) - 1
        for u, row in enumerate(self.rows):
            if row & ~full:
                raise GraphError(f"row {u} has bits outside 0..{self.n - 1}")
            if row >> u & 1:
                raise GraphError(f"self-loop at vertex {u}")
            for v in bits(row):
                if not self.rows[v] >> u & 1:
                    raise GraphError(f"asymmetric adjacency between {u} and {v}")

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self.rows == other.rows

    def __hash__(self):
        return hash((self.n, self.rows))

    def __repr__(self):
        return f"{type(self).__name__}(n={self.n}, edges={self.edges!r})"

    @property
    def vertices(self) -> range:
        return range(self.n)

    @cached_property
    def edge_count(self) -> int:
        return sum(row.bit_count() for row in self.rows) // 2

    @cached_property
    def edges(self) -> tuple[tuple[int, int], ...]:
        return tuple((u, v) for u in range(self.n) for v in bits(self.rows[u]) if u < v)

    @cached_property
    def degrees(self) -> tuple[int, ...]:
        return tuple(row.bit_count() for row in self.rows)

    @cached_property
    def adjacency(self) -> np.ndarray:
        """Dense 0/1 ``int64`` adjacency matrix (read-only)."""
        a = np.zeros((self.n, self.n), dtype=np.int64)
        for u, v in self.edges:
            a[u, v] = a[v, u] = 1
        a.setflags(write=False)
        return a

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def adjacent(self, u: int, v: int) -> bool:
        return bool(self.rows[u] >> v & 1)

    def neighbors(self, v: int) -> list[int]:
        return bits(self.rows[v])

    def components(self) -> list[list[int]]:
        seen = 0
        comps = []
        for s in range(self.n):
            if seen >> s & 1:
                continue
            comp_mask = frontier = 1 << s
            while frontier:
                nxt = 0
                for v in bits(frontier):
                    nxt |= self.rows[v]
                frontier = nxt & ~comp_mask
                comp_mask |= frontier
            seen |= comp_mask
            comps.append(bits(comp_mask))
        return comps

    def induced(self, keep: Sequence[int]) -> Graph:
        """Induced subgraph, relabelled so that ``keep[i]`` becomes ``i``."""
        index = {v: i for i, v in enumerate(keep)}
        edges = [(index[u], index[v]) for u, v in self.edges if u in index and v in index]
        return build_graph(len(keep), edges)

    def complement(self) -> Graph:
        full = self.full_mask
        return Graph(self.n, tuple(full & ~row & ~(1 << u) for u, row in enumerate(self.rows)))

    def is_regular(self) -> bool:
        return len(set(self.degrees)) <= 1

    @classmethod
    def from_adjacency(cls, matrix) -> Graph:
        a = np.asarray(matrix, dtype=bool)
        n = a.shape[0]
        if a.shape != (n, n):
            raise GraphError("adjacency matrix must be square")
        if np.any(np.diag(a)):
            raise GraphError(f"self-loop at vertex {int(np.flatnonzero(np.diag(a))[0])}")
        if not np.array_equal(a, a.T):
            raise GraphError("adjacency matrix is not symmetric")
        # bit v of row u <=> a[u, v]; packbits is big-endian so reverse columns
        packed = np.packbits(a[:, ::-1], axis=1)
        pad = packed.shape[1] * 8 - n
        rows = tuple(int.from_bytes(r.tobytes(), "big") >> pad for r in packed)
        return cls(n, rows)


@dataclass(frozen=True, eq=False)
class PatternGraph(Graph):
    """A bipartite pattern with a fixed bipartition ``part1 | part2``."""

    part1: tuple[int, ...] = ()
    part2: tuple[int, ...] = ()

    def __post_init__(self):
        super().__post_init__()
        side = {}
        for v in self.part1:
            side[v] = 0
        for v in self.part2:
            if v in side:
                raise GraphError(f"vertex {v} is in both parts")
            side[v] = 1
        if sorted(side) != list(range(self.n)):
            raise GraphError("parts must cover every vertex exactly once")
        for u, v in self.edges:
            if side[u] == side[v]:
                raise GraphError(f"edge ({u}, {v}) lies inside one part")

    def __eq__(self, other):
        if not isinstance(other, PatternGraph):
            return NotImplemented
        return (self.n, self.rows, self.part1, self.part2) == (
            other.n, other.rows, other.part1, other.part2)

    def __hash__(self):
        return hash((self.n, self.rows, self.part1, self.part2))

    def __repr__(self):
        return (f"PatternGraph(n={self.n}, edges={self.edges!r}, "
                f"parts={self.part1!r} | {self.part2!r})")

    @property
    def m(self) -> int:
        return self.edge_count

    @cached_property
    def part1_mask(self) -> int:
        return sum(1 << v for v in self.part1)

    @cached_property
    def part2_mask(self) -> int:
        return sum(1 << v for v in self.part2)

    def swapped(self) -> PatternGraph:
        return PatternGraph(self.n, self.rows, self.part2, self.part1)


def _check_pairs(n: int, edges: Iterable[tuple[int, int]]) -> list[tuple[int, int]]:
    if n < 0:
        raise GraphError(f"vertex count must be nonnegative, got {n}")
    out = []
    for pair in edges:
        u, v = pair
        if not (0 <= u < n and 0 <= v < n):
            raise GraphError(f"edge {tuple(pair)} has an endpoint outside 0..{n - 1}")
        if u == v:
            raise GraphError(f"edge {tuple(pair)} is a loop")
        out.append((u, v))
    return out


def _rows(n: int, pairs: list[tuple[int, int]]) -> tuple[int, ...]:
    rows = [0] * n
    for u, v in pairs:
        rows[u] |= 1 << v
        rows[v] |= 1 << u
    return tuple(rows)


def two_coloring(g: Graph) -> list[int]:
    """Proper 2-colouring, BFS per component with the smallest vertex coloured 0.

    Raises GraphError naming an odd cycle if none exists.
    """
    color = [-1] * g.n
    parent = [-1] * g.n
    for s in range(g.n):
        if color[s] != -1:
            continue
        color[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for v in g.neighbors(u):
                if color[v] == -1:
                    color[v] = 1 - color[u]
                    parent[v] = u
                    queue.append(v)
                elif color[v] == color[u]:
                    cycle = _odd_cycle(parent, u, v)
                    raise GraphError(
                        "graph is not bipartite: odd cycle " + "-".join(map(str, cycle)))
    return color


def _odd_cycle(parent: list[int], u: int, v: int) -> list[int]:
    def path_to_root(x):
        path = [x]
        while parent[x] != -1:
            x = parent[x]
            path.append(x)
        return path

    pu, pv = path_to_root(u), path_to_root(v)
    on_pv = set(pv)
    lca = next(x for x in pu if x in on_pv)
    left = pu[: pu.index(lca) + 1]
    right = pv[: pv.index(lca)]
    cycle = left[::-1] + right
    # rotate so the smallest vertex leads, for stable messages
    i = cycle.index(min(cycle))
    cycle = cycle[i:] + cycle[:i]
    if len(cycle) > 2 and cycle[1] > cycle[-1]:
        cycle = [cycle[0]] + cycle[:0:-1]
    return cycle


def build_graph(n: int, edges: Iterable[tuple[int, int]], partition=None) -> Graph:
    """Build a Graph, or a PatternGraph when ``partition`` is given.

    ``partition`` may be ``"auto"`` (compute a 2-colouring) or an explicit pair
    ``(part1, part2)`` of vertex lists.
    """
    rows = _rows(n, _check_pairs(n, edges))
    if partition is None:
        return Graph(n, rows)
    if isinstance(partition, str):
        if partition != "auto":
            raise GraphError(f"unknown partition request {partition!r}")
        color = two_coloring(Graph(n, rows))
        part1 = tuple(v for v in range(n) if color[v] == 0)
        part2 = tuple(v for v in range(n) if color[v] == 1)
    else:
        part1, part2 = (tuple(p) for p in partition)
    return PatternGraph(n, rows, part1, part2)


def as_pattern(g: Graph) -> PatternGraph:
    if isinstance(g, PatternGraph):
        return g
    return build_graph(g.n, g.edges, partition="auto")


def check_sequence(g: Graph, seq: Sequence[int]) -> None:
    for v in seq:
        if not 0 <= v < g.n:
            raise GraphError(f"vertex {v} is out of range for a graph on {g.n} vertices")


def common_neighborhood_mask(g: Graph, seq: Sequence[int]) -> int:
    mask = g.full_mask
    for v in seq:
        mask &= g.rows[v]
    return mask


def common_neighborhood(g: Graph, seq: Sequence[int]) -> frozenset[int]:
    """Vertices adjacent to every entry of ``seq``; the empty sequence gives V(G)."""
    check_sequence(g, seq)
    return frozenset(bits(common_neighborhood_mask(g, seq)))


def tensor_product(f: Graph, g: Graph, budget: int = DEFAULT_VERTEX_BUDGET) -> Graph:
    """Categorical product; vertex ``(a, b)`` is numbered ``a * g.n + b``."""
    if f.n == 0 or g.n == 0:
        raise GraphError("tensor product needs nonempty factors")
    n = f.n * g.n
    if n > budget:
        raise BudgetError(f"tensor product has {n} vertices, over the vertex budget of {budget}")
    rows = []
    for a in range(f.n):
        fa = f.neighbors(a)
        for b in range(g.n):
            gb = g.rows[b]
            row = 0
            for x in fa:
                row |= gb << (x * g.n)
            rows.append(row)
    return Graph(n, tuple(rows))


def tensor_power(g: Graph, s: int, budget: int = DEFAULT_VERTEX_BUDGET) -> Graph:
    if s < 1:
        raise GraphError("tensor power needs s >= 1")
    if g.n ** s > budget:
        raise BudgetError(
            f"G^{s} has {g.n ** s} vertices, over the vertex budget of {budget}")
    out = g
    for _ in range(s - 1):
        out = tensor_product(out, g, budget)
    return out


def disjoint_union(*graphs: Graph) -> Graph:
    edges, offset = [], 0
    parts1, parts2 = [], []
    for g in graphs:
        edges.extend((u + offset, v + offset) for u, v in g.edges)
        if isinstance(g, PatternGraph):
            parts1.extend(v + offset for v in g.part1)
            parts2.extend(v + offset for v in g.part2)
        offset += g.n
    if all(isinstance(g, PatternGraph) for g in graphs):
        return build_graph(offset, edges, partition=(parts1, parts2))
    return build_graph(offset, edges)


def _component_sides(h: PatternGraph, comp: list[int]) -> tuple[list[int], list[int]]:
    p1 = h.part1_mask
    return [v for v in comp if p1 >> v & 1], [v for v in comp if not p1 >> v & 1]


def width(h: PatternGraph) -> int:
    """Sum over components of the minimum degree of the bipartite complement."""
    total = 0
    for comp in h.components():
        if len(comp) == 1:
            continue
        a, b = _component_sides(h, comp)
        total += min([len(b) - h.degrees[v] for v in a] + [len(a) - h.degrees[v] for v in b])
    return total


@dataclass(frozen=True)
class SideParams:
    side: int  # 1 or 2
    r: int
    d: int
    complete: tuple[int, ...]


def side_params(h: PatternGraph, side: int) -> SideParams:
    """Complete-vertex count and minimum degree for one side of ``h``."""
    mine, other_mask = ((h.part1, h.part2_mask) if side == 1 else (h.part2, h.part1_mask))
    complete = tuple(v for v in mine if h.rows[v] & other_mask == other_mask)
    d = min((h.degrees[v] for v in mine), default=0)
    return SideParams(side, len(complete), d, complete)


def complete_side_params(h: PatternGraph) -> SideParams | None:
    """Best side for the complete-vertex bound, or None.

    A side qualifies when it has a vertex complete to the other side and
    positive minimum degree.  Ties prefer larger ``r*d``, then larger ``r``,
    then side 1.
    """
    if h.edge_count == 0:
        return None
    best = None
    for side in (1, 2):
        sp = side_params(h, side)
        if sp.r == 0 or sp.d == 0:
            continue
        if best is None or (sp.r * sp.d, sp.r) > (best.r * best.d, best.r):
            best = sp
    return best


def strip_leaves(h: PatternGraph) -> tuple[PatternGraph, int]:
    """Delete every degree-1 vertex once; returns the core and the leaf count."""
    keep = [v for v in range(h.n) if h.degrees[v] >= 2]
    s = sum(1 for v in range(h.n) if h.degrees[v] == 1)
    index = {v: i for i, v in enumerate(keep)}
    edges = [(index[u], index[v]) for u, v in h.edges if u in index and v in index]
    part1 = [index[v] for v in h.part1 if v in index]
    part2 = [index[v] for v in h.part2 if v in index]
    return build_graph(len(keep), edges, partition=(part1, part2)), s


def relabel_components(g: Graph) -> list[Graph]:
    """Connected components as standalone graphs (patterns keep their sides)."""
    out = []
    for comp in g.components():
        index = {v: i for i, v in enumerate(comp)}
        edges = [(index[u], index[v]) for u, v in g.edges if u in index]
        if isinstance(g, PatternGraph):
            p1 = [index[v] for v in g.part1 if v in index]
            p2 = [index[v] for v in g.part2 if v in index]
            out.append(build_graph(len(comp), edges, partition=(p1, p2)))
        else:
            out.append(build_graph(len(comp), edges))
    return out

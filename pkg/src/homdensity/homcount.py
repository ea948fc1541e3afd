"""Exact homomorphism counts and densities.

Three engines count homomorphisms H -> G:

* ``hom_count_brute``: backtracking over a BFS order of H, candidates are
  common neighbourhoods of the images of already-placed neighbours.
* ``hom_count_treedp``: variable elimination along an optimal elimination
  order of H (dynamic programming over a tree decomposition).
* ``hom_count_closed_form``: walk counts for paths and cycles, and the
  neighbourhood-power sum for complete bipartite patterns.

All counts are Python ints.  numpy ``int64`` is only used when the trivial
bound ``N**|H|`` guarantees no overflow; otherwise arrays hold Python ints.
"""

from __future__ import annotations

import itertools
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np

from .graph import Graph, GraphError, PatternGraph, bits, build_graph, two_coloring
from .treedecomp import decompose

BRUTE_CAP = 10
INJECTIVE_CAP = 10
TREEDP_MAX_WIDTH = 4
SEQUENCE_CAP = 6

_INT64_SAFE = 2**62
_FLOAT_EXACT = 2**53


class EngineError(ValueError):
    """An engine cannot handle the requested input."""


class EngineDisagreement(AssertionError):
    """Two exact engines returned different counts (always a defect)."""


@dataclass(frozen=True)
class Density:
    """``count / base**exponent`` kept exactly."""

    count: int
    base: int
    exponent: int

    @cached_property
    def value(self) -> Fraction:
        return Fraction(self.count, self.base**self.exponent)

    @property
    def float_view(self) -> float:
        return float(self.value)

    def __float__(self):
        return self.float_view


# -- shape recognition -------------------------------------------------------


@dataclass(frozen=True)
class Shape:
    kind: str  # "path", "cycle" or "kab"
    a: int
    b: int = 0


def recognize(h: Graph) -> Shape | None:
    """Identify P_k (k edges), C_k or K_{a,b}; b is the smaller side."""
    n, m = h.n, h.edge_count
    if m == 0 or len(h.components()) != 1:
        return None
    degs = h.degrees
    if max(degs) <= 2:
        if m == n - 1:
            return Shape("path", m)
        if m == n:
            return Shape("cycle", m)
    try:
        color = two_coloring(h)
    except GraphError:
        return None
    s1 = color.count(0)
    s2 = n - s1
    if m == s1 * s2:
        return Shape("kab", max(s1, s2), min(s1, s2))
    return None


# -- brute force -------------------------------------------------------------


def _bfs_order(h: Graph) -> list[int]:
    order = []
    for comp in h.components():
        start = max(comp, key=lambda v: (h.degrees[v], -v))
        seen = {start}
        queue = [start]
        while queue:
            u = queue.pop(0)
            order.append(u)
            for v in sorted(h.neighbors(u), key=lambda x: (-h.degrees[x], x)):
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
    return order


def _earlier_neighbors(h: Graph, order: list[int]) -> list[list[int]]:
    pos = {v: i for i, v in enumerate(order)}
    return [[pos[u] for u in h.neighbors(v) if pos[u] < i] for i, v in enumerate(order)]


def _backtrack(h: Graph, g: Graph, injective: bool, workers: int = 1) -> int:
    if h.n == 0:
        return 1
    order = _bfs_order(h)
    back = _earlier_neighbors(h, order)
    if h.n == 1:
        return g.n
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = pool.map(_count_with_first, itertools.repeat((g, back, injective)), range(g.n))
            return sum(parts)
    return sum(_count_with_first((g, back, injective), v) for v in range(g.n))


def _count_with_first(ctx, first: int) -> int:
    g, back, injective = ctx
    rows = g.rows
    full = g.full_mask
    k = len(back)
    images = [first] + [0] * (k - 1)

    def rec(i: int, used: int) -> int:
        cand = full
        for j in back[i]:
            cand &= rows[images[j]]
        if injective:
            cand &= ~used
        if i == k - 1:
            return cand.bit_count()
        total = 0
        while cand:
            low = cand & -cand
            images[i] = low.bit_length() - 1
            total += rec(i + 1, used | low)
            cand ^= low
        return total

    return rec(1, 1 << first)


def hom_count_brute(h: Graph, g: Graph, cap: int = BRUTE_CAP, workers: int = 1) -> int:
    """Count all homomorphisms by backtracking.

    Work splits on the image of the first pattern vertex; partial counts are
    integers summed in a fixed order, so the result does not depend on
    ``workers``.
    """
    if h.n > cap:
        raise EngineError(
            f"pattern has {h.n} vertices, over the brute-force cap of {cap}; "
            "use hom_count_treedp")
    return _backtrack(h, g, injective=False, workers=workers)


def injective_count(h: Graph, g: Graph, cap: int = INJECTIVE_CAP) -> int:
    if h.n > cap:
        raise EngineError(f"pattern has {h.n} vertices, over the injective cap of {cap}")
    if h.n > g.n:
        return 0
    return _backtrack(h, g, injective=True)


# -- variable elimination ----------------------------------------------------


def contract(h: Graph, weights: np.ndarray, unary=None, order: Sequence[int] | None = None):
    """Sum over maps V(H) -> [q] of prod_edges weights[x, y] * prod_vertices unary[v][x].

    ``unary`` is either None, a single length-q vector used for every vertex,
    or a dict ``{vertex: vector}``.  Arrays may be int64 or object dtype.
    """
    q = weights.shape[0]
    if order is None:
        order = decompose(h).order
    factors: list[tuple[tuple[int, ...], np.ndarray]] = [((u, v), weights) for u, v in h.edges]
    if unary is not None:
        if isinstance(unary, dict):
            factors += [((v,), np.asarray(vec)) for v, vec in unary.items()]
        else:
            factors += [((v,), np.asarray(unary)) for v in range(h.n)]
    scalars = []
    for v in order:
        bucket = [f for f in factors if v in f[0]]
        if not bucket:
            scalars.append(q)
            continue
        factors = [f for f in factors if v not in f[0]]
        scope = sorted(set().union(*(f[0] for f in bucket)) - {v})
        operands = []
        for sc, arr in bucket:
            operands += [arr, list(sc)]
        out = np.einsum(*operands, scope)
        if scope:
            factors.append((tuple(scope), out))
        else:
            scalars.append(out.item() if isinstance(out, np.ndarray) else out)
    result = 1
    for s in scalars:
        result = result * s
    return result


def _count_dtype(g_n: int, h_n: int):
    return np.int64 if g_n**h_n < _INT64_SAFE else object


def hom_count_treedp(h: Graph, g: Graph, max_width: int = TREEDP_MAX_WIDTH) -> int:
    """Count homomorphisms by dynamic programming over an optimal tree decomposition."""
    if h.n == 0:
        return 1
    td = decompose(h)
    if td.width > max_width:
        warnings.warn(
            f"tree decomposition width {td.width} exceeds {max_width}; "
            "falling back to brute force", RuntimeWarning, stacklevel=2)
        return hom_count_brute(h, g, cap=max(BRUTE_CAP, h.n))
    dtype = _count_dtype(g.n, h.n)
    a = g.adjacency if dtype is np.int64 else g.adjacency.astype(object)
    return int(contract(h, a, order=td.order))


# -- closed forms ------------------------------------------------------------


def _matmul_exact(x: np.ndarray, y: np.ndarray, bound: int) -> np.ndarray:
    """Exact product of nonnegative integer matrices whose result entries are <= bound."""
    if bound < _FLOAT_EXACT:
        return np.rint(x.astype(np.float64) @ y.astype(np.float64)).astype(np.int64)
    return np.dot(x.astype(object), y.astype(object))


def adjacency_power(g: Graph, k: int) -> np.ndarray:
    """A^k with exact integer entries."""
    n = g.n
    a = g.adjacency
    out = np.eye(n, dtype=np.int64)
    for j in range(1, k + 1):
        out = _matmul_exact(out, a, n ** max(j - 1, 0))
    return out


def codegree_matrix(g: Graph) -> np.ndarray:
    """codeg[u, v] = |N(u) & N(v)|; the diagonal holds degrees."""
    return adjacency_power(g, 2)


def walk_count(g: Graph, k: int) -> int:
    """Number of walks with k edges, i.e. homomorphisms from P_k."""
    x = np.ones(g.n, dtype=_count_dtype(g.n, k + 1))
    a = g.adjacency if x.dtype == np.int64 else g.adjacency.astype(object)
    for _ in range(k):
        x = a @ x
    return int(sum(int(v) for v in x)) if x.dtype == object else int(x.sum())


def closed_walk_count(g: Graph, k: int) -> int:
    """trace(A^k), i.e. homomorphisms from C_k."""
    lo, hi = k // 2, k - k // 2
    p_lo = adjacency_power(g, lo)
    p_hi = p_lo if hi == lo else _matmul_exact(p_lo, g.adjacency, g.n ** max(lo, 0))
    if g.n**k < _INT64_SAFE and p_lo.dtype == np.int64 and p_hi.dtype == np.int64:
        return int((p_lo * p_hi).sum())
    return sum(int(x) * int(y) for x, y in zip(p_lo.ravel(), p_hi.ravel()))


def kab_count(g: Graph, a: int, b: int, method: str = "auto") -> int:
    """h_{K_{a,b}}(G) as the sum over b-sequences T of |N(T)|**a.

    ``method="sequences"`` enumerates all N**b sequences; ``"multisets"``
    enumerates nondecreasing sequences with multinomial weights; ``"auto"``
    additionally uses degree and codegree histograms for b <= 2.
    """
    n = g.n
    if b == 0:
        return n**a
    if method == "sequences":
        total = 0
        for t in itertools.product(range(n), repeat=b):
            mask = g.full_mask
            for v in t:
                mask &= g.rows[v]
            total += mask.bit_count() ** a
        return total
    if method == "auto" and b == 1:
        return sum(d**a for d in g.degrees)
    if method == "auto" and b == 2 and n > 32:
        hist = np.bincount(codegree_matrix(g).ravel(), minlength=1)
        return sum(int(c) * i**a for i, c in enumerate(hist) if c)
    if b > SEQUENCE_CAP:
        raise EngineError(f"sequence length {b} is over the cap of {SEQUENCE_CAP}")
    fact_b = math.factorial(b)
    rows = g.rows
    total = 0

    def rec(start: int, depth: int, mask: int, weight_den: int, last: int, run: int):
        nonlocal total
        if depth == b:
            total += (fact_b // weight_den) * mask.bit_count() ** a
            return
        for v in range(start, n):
            new = mask & rows[v]
            if not new and a > 0:
                continue
            new_run = run + 1 if v == last else 1
            rec(v, depth + 1, new, weight_den * new_run, v, new_run)

    rec(0, 0, g.full_mask, 1, -1, 0)
    return total


def hom_count_closed_form(h: Graph, g: Graph) -> int:
    shape = recognize(h)
    if shape is None:
        raise EngineError("pattern is not a path, cycle or complete bipartite graph; "
                          "use hom_count_treedp or hom_count_brute")
    if shape.kind == "path":
        return walk_count(g, shape.a)
    if shape.kind == "cycle":
        return closed_walk_count(g, shape.a)
    return kab_count(g, shape.a, shape.b)


# -- densities ---------------------------------------------------------------


def hom_count(h: Graph, g: Graph, crosscheck: bool = False) -> int:
    """Count with the preferred engine: closed form, else tree DP, else brute force."""
    counts = {}
    if recognize(h) is not None:
        counts["closed_form"] = hom_count_closed_form(h, g)
    if not counts or crosscheck:
        if h.n == 0 or decompose(h).width <= TREEDP_MAX_WIDTH:
            counts["treedp"] = hom_count_treedp(h, g)
        if not counts or (crosscheck and h.n <= BRUTE_CAP):
            counts["brute"] = hom_count_brute(h, g)
    values = set(counts.values())
    if len(values) != 1:
        raise EngineDisagreement(f"engines disagree: {counts}")
    return values.pop()


def applicable_engines(h: Graph, g: Graph) -> dict[str, int]:
    """Run every engine that applies and return their counts by name."""
    out = {}
    if h.n <= BRUTE_CAP:
        out["brute"] = hom_count_brute(h, g)
    if decompose(h).width <= TREEDP_MAX_WIDTH:
        out["treedp"] = hom_count_treedp(h, g)
    if recognize(h) is not None:
        out["closed_form"] = hom_count_closed_form(h, g)
    return out


def density(h: Graph, g: Graph, crosscheck: bool = False) -> Density:
    if g.n == 0:
        raise GraphError("density needs a nonempty host graph")
    return Density(hom_count(h, g, crosscheck=crosscheck), g.n, h.n)


def injective_density(h: Graph, g: Graph) -> Fraction:
    """Fraction of injective maps V(H) -> V(G) that are homomorphisms."""
    if g.n < h.n:
        warnings.warn(f"host has {g.n} < {h.n} vertices; injective density is 0",
                      RuntimeWarning, stacklevel=2)
        return Fraction(0)
    return Fraction(injective_count(h, g), math.perm(g.n, h.n))


# -- kernels -----------------------------------------------------------------


def _as_fraction(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True, eq=False)
class Kernel:
    """Step function on [0,1]^2 with q blocks of masses ``measure``."""

    weights: tuple[tuple[Fraction, ...], ...]
    measure: tuple[Fraction, ...]

    def __post_init__(self):
        w = tuple(tuple(_as_fraction(x) for x in row) for row in self.weights)
        mu = tuple(_as_fraction(x) for x in self.measure)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "measure", mu)
        q = len(mu)
        if q == 0 or len(w) != q or any(len(row) != q for row in w):
            raise ValueError(f"kernel needs a {q}x{q} weight matrix for {q} blocks")
        for i in range(q):
            for j in range(q):
                if w[i][j] < 0:
                    raise ValueError(f"negative weight at ({i}, {j})")
                if w[i][j] != w[j][i]:
                    raise ValueError(f"weights are not symmetric at ({i}, {j})")
        if any(x < 0 for x in mu):
            raise ValueError("measure has a negative mass")
        if sum(mu) != 1:
            raise ValueError(f"measure sums to {sum(mu)}, not 1")

    def __eq__(self, other):
        if not isinstance(other, Kernel):
            return NotImplemented
        return self.weights == other.weights and self.measure == other.measure

    def __hash__(self):
        return hash((self.weights, self.measure))

    @property
    def size(self) -> int:
        return len(self.measure)

    @classmethod
    def from_graph(cls, g: Graph) -> Kernel:
        w = tuple(tuple(Fraction(int(g.adjacent(u, v))) for v in range(g.n)) for u in range(g.n))
        return cls(w, tuple(Fraction(1, g.n) for _ in range(g.n)))

    @classmethod
    def constant(cls, p) -> Kernel:
        return cls(((_as_fraction(p),),), (Fraction(1),))

    def weight_array(self) -> np.ndarray:
        return np.array(self.weights, dtype=object)

    def measure_array(self) -> np.ndarray:
        return np.array(self.measure, dtype=object)


def kernel_density(h: Graph, w: Kernel) -> Fraction:
    """Integral of prod_edges W(x_i, x_j) against the product block measure."""
    if h.n == 0:
        return Fraction(1)
    out = contract(h, w.weight_array(), unary=w.measure_array())
    return _as_fraction(out)


def kernel_density_brute(h: Graph, w: Kernel) -> Fraction:
    """Same quantity by enumerating all q**|H| block assignments."""
    total = Fraction(0)
    for blocks in itertools.product(range(w.size), repeat=h.n):
        term = Fraction(1)
        for v in blocks:
            term *= w.measure[v]
        if not term:
            continue
        for u, v in h.edges:
            term *= w.weights[blocks[u]][blocks[v]]
            if not term:
                break
        total += term
    return total


def density_value(h: Graph, host) -> Fraction:
    """t_H of a Graph or a Kernel host, as an exact rational."""
    if isinstance(host, Kernel):
        return kernel_density(h, host)
    return density(h, host).value


def k2() -> PatternGraph:
    return build_graph(2, [(0, 1)], partition=([0], [1]))


def kab(a: int, b: int) -> PatternGraph:
    """K_{a,b} with the a-side first."""
    edges = [(i, a + j) for i in range(a) for j in range(b)]
    return build_graph(a + b, edges, partition=(range(a), range(a, a + b)))


__all__ = [
    "Density", "EngineDisagreement", "EngineError", "Kernel", "Shape", "applicable_engines",
    "bits", "closed_walk_count", "codegree_matrix", "contract", "density", "density_value",
    "hom_count", "hom_count_brute", "hom_count_closed_form", "hom_count_treedp",
    "injective_count", "injective_density", "kab", "kab_count", "kernel_density",
    "kernel_density_brute", "k2", "recognize", "walk_count",
]

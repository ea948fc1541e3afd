"""Monochromatic densities of 2-edge-colourings of K_N and small-N multiplicity constants."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .generators import RNG_ALGORITHM, rng
from .graph import Graph, GraphError, build_graph
from .homcount import density, injective_count, recognize

EXHAUSTIVE_MAX_N = 7


@dataclass(frozen=True)
class Coloring:
    """Red edges are ``red``; every other pair of K_N is blue."""

    red: Graph

    @property
    def N(self) -> int:
        return self.red.n

    @property
    def blue(self) -> Graph:
        return self.red.complement()

    def swapped(self) -> Coloring:
        return Coloring(self.blue)


def _inj_c4_rows(rows: tuple[int, ...] | list[int]) -> int:
    """Injective C4 homomorphisms from adjacency rows (closed walks minus degenerate ones)."""
    n = len(rows)
    walks = 0
    deg_sq = 0
    edges2 = 0
    for u in range(n):
        ru = rows[u]
        du = ru.bit_count()
        deg_sq += du * du
        edges2 += du
        for v in range(n):
            walks += (ru & rows[v]).bit_count() ** 2
    return walks - 2 * deg_sq + edges2


def _is_c4(h: Graph) -> bool:
    s = recognize(h)
    return s is not None and s.kind == "cycle" and s.a == 4


def mono_injective(col: Coloring, h: Graph) -> int:
    if _is_c4(h):
        return _inj_c4_rows(col.red.rows) + _inj_c4_rows(col.blue.rows)
    return injective_count(h, col.red) + injective_count(h, col.blue)


def mono_hom_density(col: Coloring, h: Graph, variant: str = "injective") -> Fraction:
    """Monochromatic share of copies (``injective``) or of all maps (``hom``)."""
    if variant == "hom":
        return density(h, col.red).value + density(h, col.blue).value
    if variant != "injective":
        raise ValueError(f"unknown variant {variant!r}")
    if col.N < h.n:
        raise GraphError(f"K_{col.N} has fewer vertices than the pattern ({h.n})")
    return Fraction(mono_injective(col, h), math.perm(col.N, h.n))


@dataclass(frozen=True)
class ScanRecord:
    N: int
    mode: str
    # size of the colouring space and how many were actually evaluated
    colorings: int
    evaluated: int
    min_injective: int
    total_injective: int
    value: Fraction
    automorphisms: int
    min_copies: Fraction
    total_copies: Fraction
    argmin_red_edges: tuple[tuple[int, int], ...]
    is_exact: bool
    seed: int | None = None
    rng_algorithm: str | None = None


def _pairs(n: int) -> list[tuple[int, int]]:
    return [(u, v) for u in range(n) for v in range(u + 1, n)]


def _mono_counter(h: Graph):
    if _is_c4(h):
        def one(rows):
            return _inj_c4_rows(rows)
    else:
        def one(rows):
            return injective_count(h, Graph(len(rows), tuple(rows)))

    def mono(rows: list[int], full: int) -> int:
        blue = [full & ~r & ~(1 << u) for u, r in enumerate(rows)]
        return one(rows) + one(blue)
    return mono


def multiplicity_scan(h: Graph, N: int, mode: str = "exhaustive", samples: int = 1000,
                      seed: int = 0) -> ScanRecord:
    """Minimum monochromatic copy share over colourings of K_N.

    Exhaustive mode fixes the colour of the first pair (the share is invariant
    under swapping colours) and walks the remaining pairs in Gray-code order,
    flipping one pair per step.  Random mode gives an upper bound only.
    """
    if N < h.n:
        raise GraphError(f"K_{N} has fewer vertices than the pattern ({h.n})")
    pairs = _pairs(N)
    full = (1 << N) - 1
    total = math.perm(N, h.n)
    aut = injective_count(h, h)
    best = None
    best_edges: tuple = ()
    count = 0
    mono = _mono_counter(h)
    if mode == "exhaustive":
        if N > EXHAUSTIVE_MAX_N:
            raise GraphError(f"exhaustive scan is limited to N <= {EXHAUSTIVE_MAX_N}")
        rows = [0] * N
        if pairs:
            u, v = pairs[0]
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        free = pairs[1:]
        for i in range(1 << len(free)):
            if i:
                u, v = free[(i & -i).bit_length() - 1]
                rows[u] ^= 1 << v
                rows[v] ^= 1 << u
            count += 1
            val = mono(rows, full)
            if best is None or val < best:
                best = val
                best_edges = tuple((a, b) for a, b in pairs if rows[a] >> b & 1)
        exact = True
        seed_out = algo = None
    elif mode == "random":
        gen = rng(seed)
        for _ in range(samples):
            bits_ = gen.integers(0, 2, size=len(pairs))
            red = build_graph(N, [p for p, b in zip(pairs, bits_) if b])
            count += 1
            val = mono(list(red.rows), full)
            if best is None or val < best:
                best, best_edges = val, red.edges
        exact = False
        seed_out, algo = seed, RNG_ALGORITHM
    else:
        raise ValueError(f"unknown mode {mode!r}")
    space = 1 << len(pairs) if mode == "exhaustive" else samples
    return ScanRecord(N, mode, space, count, best, total, Fraction(best, total), aut,
                      Fraction(best, aut), Fraction(total, aut), best_edges, exact,
                      seed_out, algo)

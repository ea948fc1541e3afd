"""Dependent random choice diagnostics.

Sequences are grouped by their *support* (set of distinct entries): the
common neighbourhood of a sequence only depends on its support, and a
j-set is the support of exactly ``surj(k, j)`` sequences of length k.
Exhaustive mode therefore walks supports instead of all N**k sequences and
multiplies by surjection counts.

The rarity cutoff ``c * t**(k/(rd)) * N`` is irrational in general.  It is
never evaluated in floating point: ``|N(S)| <= cutoff`` iff
``|N(S)|**(rd) <= c**(rd) * t**k * N**(rd)``, and the largest integer
satisfying that is found by an exact integer root.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np

from .generators import RNG_ALGORITHM, rng
from .graph import (Graph, PatternGraph, bits, common_neighborhood_mask,
                    complete_side_params, side_params)
from .homcount import hom_count, kab_count

DEFAULT_ENUM_BUDGET = 5_000_000


class DrcError(ValueError):
    pass


def reference_constant(n: int) -> Fraction:
    return Fraction(1, (2 * n) ** (2 * n))


@lru_cache(maxsize=None)
def surj(k: int, j: int) -> int:
    """Number of length-k sequences whose set of entries is a fixed j-set."""
    return sum((-1) ** i * math.comb(j, i) * (j - i) ** k for i in range(j + 1))


def root_floor(value: Fraction, e: int) -> int:
    """Largest integer x >= 0 with x**e <= value."""
    if value < 0:
        return -1
    lo, hi = 0, 1
    while hi**e <= value:
        hi *= 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if mid**e <= value:
            lo = mid
        else:
            hi = mid
    return lo


def root_ceil(value: Fraction, e: int) -> int:
    """Smallest integer x >= 0 with x**e >= value."""
    x = root_floor(value, e)
    return x if x**e == value else x + 1


def log_fraction(x: Fraction) -> float:
    return math.log(x.numerator) - math.log(x.denominator)


@dataclass(frozen=True)
class DrcParams:
    r: int
    d: int
    n: int
    c: Fraction | None = None

    def __post_init__(self):
        if self.r < 1 or self.d < 1 or self.n < 1:
            raise DrcError("r, d and n must be positive")
        if self.d > self.n:
            raise DrcError(f"need d <= n, got d={self.d}, n={self.n}")
        c = reference_constant(self.n) if self.c is None else Fraction(self.c)
        if not 0 < c <= 1:
            raise DrcError(f"rarity constant must lie in (0, 1], got {c}")
        object.__setattr__(self, "c", c)

    @property
    def k_range(self) -> range:
        return range(self.d, self.n + 1)

    @property
    def uses_reference_constant(self) -> bool:
        return self.c == reference_constant(self.n)


@dataclass(frozen=True)
class Thresholds:
    """Per-k rarity data for a host graph."""

    rd: int
    # rare iff |N(S)|**rd <= power[k]
    power: dict[int, Fraction]
    rare_max: dict[int, int]
    edge_min: dict[int, int]

    def cutoff_float(self, k: int) -> float:
        p = self.power[k]
        return math.exp(log_fraction(p) / self.rd) if p else 0.0


def thresholds(n_vertices: int, t: Fraction, params: DrcParams) -> Thresholds:
    rd = params.r * params.d
    power, rare_max, edge_min = {}, {}, {}
    for k in range(1, params.n + 1):
        p = params.c**rd * t**k * n_vertices**rd
        power[k] = p
        rare_max[k] = root_floor(p, rd)
        edge_min[k] = root_ceil(p, rd)
    return Thresholds(rd, power, rare_max, edge_min)


@dataclass(frozen=True)
class SupportTable:
    """Every nonempty vertex set of size <= kmax with nonempty common neighbourhood."""

    sizes: tuple[int, ...]
    common: tuple[int, ...]  # common-neighbourhood masks
    members: tuple[int, ...]  # support masks


def support_table(g: Graph, kmax: int, budget: int = DEFAULT_ENUM_BUDGET) -> SupportTable:
    sizes, common, members = [], [], []
    rows = g.rows

    def rec(start: int, depth: int, mask: int, support: int):
        for v in range(start, g.n):
            new = mask & rows[v]
            if not new:
                continue
            sizes.append(depth + 1)
            common.append(new)
            members.append(support | 1 << v)
            if len(sizes) > budget:
                raise DrcError(f"support enumeration exceeds the budget of {budget}; "
                               "use sampling mode")
            if depth + 1 < kmax:
                rec(v + 1, depth + 1, new, support | 1 << v)

    rec(0, 0, g.full_mask, 0)
    return SupportTable(tuple(sizes), tuple(common), tuple(members))


@dataclass
class DrcReport:
    params: DrcParams
    N: int
    exhaustive: bool
    h_krd: int
    t_krd: Fraction
    thresholds: Thresholds
    rare_counts: dict[int, int]
    x_k: dict[int, int]
    x_k_by_t: dict[int, int]
    good_count: int
    bad_counts: dict[int, int]  # keyed by the smallest witness k
    good_sum: int
    verdict: bool
    # support mask of T -> None (good) or smallest witness k
    classification: dict[int, int | None] = field(repr=False)
    seed: int | None = None
    samples: int | None = None
    rng_algorithm: str | None = None

    def classify(self, t: Sequence[int]) -> int | None:
        """None if T is good, else the smallest k for which T is bad."""
        support = 0
        for v in t:
            support |= 1 << v
        return self.classification.get(support, self.params.d)

    @property
    def classified_total(self) -> int:
        return self.good_count + sum(self.bad_counts.values())


def _k_rd_density(g: Graph, r: int, d: int) -> tuple[int, Fraction]:
    h = kab_count(g, d, r)
    return h, Fraction(h, g.n ** (r + d))


def drc_classify(g: Graph, params: DrcParams, samples: int | None = None, seed: int = 0,
                 budget: int = DEFAULT_ENUM_BUDGET) -> DrcReport:
    """Rare/bad/good classification of all r-sequences T.

    With ``samples`` set, T and S are sampled uniformly from the seeded stream
    and the report is marked non-exhaustive.
    """
    if g.n == 0:
        raise DrcError("empty host graph")
    h, t = _k_rd_density(g, params.r, params.d)
    if h == 0:
        raise DrcError(f"G has no homomorphic copy of K_{{{params.r},{params.d}}}; "
                       "the statement is vacuous")
    th = thresholds(g.n, t, params)
    if samples is not None:
        return _drc_sampled(g, params, h, t, th, samples, seed)
    r, n, N = params.r, params.n, g.n
    if sum(math.comb(N, j) for j in range(1, max(n, r) + 1)) > budget:
        raise DrcError(f"exhaustive classification over N={N} exceeds the enumeration "
                       f"budget of {budget}; pass samples=K for sampling mode")
    table = support_table(g, max(n, r), budget)
    ks = list(params.k_range)

    rare_counts, x_k = {}, {}
    # R[k][T-support] = number of rare k-sequences inside N(T)
    rare_in = {k: {} for k in ks}
    t_supports = [(sz, cm, mb) for sz, cm, mb in zip(table.sizes, table.common, table.members)
                  if sz <= r]
    for k in ks:
        cut = th.rare_max[k]
        nonrare = 0
        xk = 0
        rare_sets = []
        for sz, cm, mb in zip(table.sizes, table.common, table.members):
            if sz > k:
                continue
            c = cm.bit_count()
            if c > cut:
                nonrare += surj(k, sz)
            else:
                xk += surj(k, sz) * c**r
                rare_sets.append((sz, cm, mb))
        rare_counts[k] = N**k - nonrare
        x_k[k] = xk
        bucket = rare_in[k]
        # choose the cheaper direction for the containment join
        down = sum(sum(math.comb(cm.bit_count(), j) for j in range(1, r + 1))
                   for _, cm, _ in rare_sets)
        if down <= len(rare_sets) * len(t_supports):
            for sz, cm, _ in rare_sets:
                w = surj(k, sz)
                verts = bits(cm)
                for j in range(1, r + 1):
                    for combo in itertools.combinations(verts, j):
                        key = sum(1 << v for v in combo)
                        bucket[key] = bucket.get(key, 0) + w
        else:
            for _, tcm, tmb in t_supports:
                acc = 0
                for sz, _, mb in rare_sets:
                    if mb & tcm == mb:
                        acc += surj(k, sz)
                if acc:
                    bucket[tmb] = acc

    classification: dict[int, int | None] = {}
    good_count = good_sum = 0
    bad_counts = {k: 0 for k in ks}
    x_k_by_t = {k: 0 for k in ks}
    enumerated = 0
    for sz, cm, mb in t_supports:
        mult = surj(r, sz)
        enumerated += mult
        size = cm.bit_count()
        witness = None
        for k in ks:
            rk = rare_in[k].get(mb, 0)
            x_k_by_t[k] += mult * rk
            if witness is None and 2 * n * rk >= size**k:
                witness = k
        classification[mb] = witness
        if witness is None:
            good_count += mult
            good_sum += mult * size**params.d
        else:
            bad_counts[witness] += mult
    # supports with empty common neighbourhood: 0 >= 0, bad for k = d
    bad_counts[params.d] += N**r - enumerated
    return DrcReport(params, N, True, h, t, th, rare_counts, x_k, x_k_by_t, good_count,
                     bad_counts, good_sum, 2 * good_sum >= h, classification)


def _drc_sampled(g, params, h, t, th, samples, seed) -> DrcReport:
    gen = rng(seed)
    r, n, N = params.r, params.n, g.n
    ks = list(params.k_range)
    good_count = 0
    good_acc = 0
    bad_counts = {k: 0 for k in ks}
    classification = {}
    for _ in range(samples):
        tseq = [int(x) for x in gen.integers(0, N, size=r)]
        cm = common_neighborhood_mask(g, tseq)
        verts = bits(cm)
        witness = None
        for k in ks:
            if not verts:
                witness = k
                break
            picks = gen.integers(0, len(verts), size=(samples, k))
            rare = 0
            for row in picks:
                s_mask = common_neighborhood_mask(g, [verts[i] for i in row])
                if s_mask.bit_count() <= th.rare_max[k]:
                    rare += 1
            if 2 * n * rare >= samples:
                witness = k
                break
        support = sum(1 << v for v in tseq)
        classification[support] = witness
        if witness is None:
            good_count += 1
            good_acc += len(verts) ** params.d
        else:
            bad_counts[witness] += 1
    # scale the sampled mean to an estimate of the sum over all N**r sequences
    good_sum = (good_acc * N**r) // samples
    return DrcReport(params, N, False, h, t, th, {}, {}, {}, good_count, bad_counts,
                     good_sum, 2 * good_sum >= h, classification, seed=seed, samples=samples,
                     rng_algorithm=RNG_ALGORITHM)


@dataclass(frozen=True)
class DrcVerdict:
    good_sum: int
    h_krd: int
    half_h: Fraction
    holds: bool
    exhaustive: bool


def drc_verify(g: Graph, params: DrcParams, **kwargs) -> DrcVerdict:
    """Classify, then check the good sum against an independently recomputed h_{K_{r,d}}."""
    report = drc_classify(g, params, **kwargs)
    h = kab_count(g, params.d, params.r, method="multisets")
    if report.exhaustive and h != report.h_krd:
        raise AssertionError(f"h_K_(r,d) mismatch: {h} != {report.h_krd}")
    return DrcVerdict(report.good_sum, h, Fraction(h, 2), 2 * report.good_sum >= h,
                      report.exhaustive)


# -- hypergraphs -------------------------------------------------------------


@dataclass(frozen=True)
class Hypergraph:
    h: int
    edges: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        norm = []
        for e in self.edges:
            e = tuple(sorted(set(e)))
            if not e:
                raise ValueError("hypergraph edges must be nonempty")
            if any(not 0 <= v < self.h for v in e):
                raise ValueError(f"edge {e} has a vertex outside 0..{self.h - 1}")
            norm.append(e)
        object.__setattr__(self, "edges", tuple(norm))

    @property
    def edge_sizes(self) -> tuple[int, ...]:
        return tuple(len(e) for e in self.edges)


class SeqHypergraph:
    """Strongly directed hypergraph on vertices 0..N-1.

    Edges of length k are given by a 0/1 tensor of shape (N,)*k, built either
    from explicit sequences or from a predicate on sequences.
    """

    def __init__(self, N: int, tensors: dict[int, np.ndarray]):
        self.N = N
        self._tensors = tensors

    @classmethod
    def from_sequences(cls, N: int, edges: Iterable[Sequence[int]], ks: Iterable[int]):
        tensors = {k: np.zeros((N,) * k, dtype=np.int64) for k in ks}
        for seq in edges:
            tensors[len(seq)][tuple(seq)] = 1
        return cls(N, tensors)

    @classmethod
    def from_predicate(cls, N: int, pred: Callable[[tuple[int, ...]], bool], ks: Iterable[int]):
        tensors = {}
        for k in ks:
            arr = np.zeros((N,) * k, dtype=np.int64)
            for seq in itertools.product(range(N), repeat=k):
                arr[seq] = bool(pred(seq))
            tensors[k] = arr
        return cls(N, tensors)

    @classmethod
    def from_threshold(cls, common_sizes: dict[int, np.ndarray], vertices: Sequence[int],
                       edge_min: dict[int, int], ks: Iterable[int]):
        """Sequence R over ``vertices`` is an edge iff |N(R)| >= edge_min[len(R)].

        ``common_sizes[k]`` holds |N(R)| for all k-sequences of the host graph.
        """
        idx = np.asarray(vertices, dtype=np.intp)
        tensors = {}
        for k in ks:
            sub = common_sizes[k][np.ix_(*([idx] * k))] if k > 0 else common_sizes[k]
            tensors[k] = (sub >= edge_min[k]).astype(np.int64)
        return cls(len(vertices), tensors)

    def tensor(self, k: int) -> np.ndarray:
        return self._tensors[k]

    def is_edge(self, seq: Sequence[int]) -> bool:
        return bool(self._tensors[len(seq)][tuple(seq)])

    def non_edges(self, k: int) -> int:
        return self.N**k - int(self._tensors[k].sum())


@dataclass(frozen=True)
class EmbedResult:
    count: int
    N: int
    h: int
    e: int
    non_edges: dict[int, int]
    hypothesis: dict[int, bool]
    hypothesis_holds: bool
    half_bound_holds: bool


_LETTERS = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"


def hom_count_hyper(hg: Hypergraph, gd: SeqHypergraph) -> int:
    """Maps V(H) -> V(Gd) sending each edge (in vertex order) to an edge of Gd."""
    if gd.N == 0:
        return 0 if hg.h else 1
    covered = sorted(set(v for e in hg.edges for v in e))
    free = hg.h - len(covered)
    if not hg.edges:
        return gd.N**hg.h
    ops = []
    for e in hg.edges:
        ops += [gd.tensor(len(e)), list(e)]
    if gd.N ** len(covered) >= 2**62:
        ops = [x.astype(object) if isinstance(x, np.ndarray) else x for x in ops]
    total = np.einsum(*ops, [], optimize="greedy")
    return int(total) * gd.N**free


def hyper_embed_count(hg: Hypergraph, gd: SeqHypergraph) -> EmbedResult:
    count = hom_count_hyper(hg, gd)
    e = len(hg.edges)
    N = gd.N
    non_edges, hyp = {}, {}
    if e:
        dmin = min(hg.edge_sizes)
        for k in range(dmin, hg.h + 1):
            non_edges[k] = gd.non_edges(k)
            hyp[k] = 2 * e * non_edges[k] <= N**k
    holds = all(hyp.values())
    return EmbedResult(count, N, hg.h, e, non_edges, hyp, holds, 2 * count >= N**hg.h)


@dataclass(frozen=True)
class EmbedBatch:
    counts: np.ndarray  # (P,)
    hypothesis: np.ndarray  # (P,) bool
    half_bound: np.ndarray  # (P,) bool


def hyper_embed_batch(hg: Hypergraph, N: int, tensors: dict[int, np.ndarray]) -> EmbedBatch:
    """hyper_embed_count for P predicates at once.

    ``tensors[k]`` has shape (P,) + (N,)*k and must cover every k from the
    smallest edge size up to h.
    """
    P = next(iter(tensors.values())).shape[0]
    e = len(hg.edges)
    total = N**hg.h
    if not e:
        counts = np.full(P, total, dtype=np.int64)
        hyp = np.ones(P, dtype=bool)
    else:
        covered = sorted(set(v for ed in hg.edges for v in ed))
        batch = hg.h  # an index label no vertex uses
        ops = []
        for ed in hg.edges:
            ops += [tensors[len(ed)].astype(np.int64), [batch, *ed]]
        counts = np.einsum(*ops, [batch]) * N ** (hg.h - len(covered))
        hyp = np.ones(P, dtype=bool)
        for k in range(min(hg.edge_sizes), hg.h + 1):
            t = tensors[k].reshape(P, -1)
            non = N**k - t.sum(axis=1)
            hyp &= 2 * e * non <= N**k
    return EmbedBatch(counts, hyp, 2 * counts >= total)


# -- constructive lower bound ------------------------------------------------


def common_size_tensors(g: Graph, kmax: int) -> dict[int, np.ndarray]:
    """|N(R)| for every sequence R of length 1..kmax, as dense int64 tensors."""
    a = g.adjacency.astype(np.float64)
    out = {0: np.array(g.n, dtype=np.int64)}
    rows = np.ones((1, g.n))
    for k in range(1, kmax + 1):
        # rows[(i1..i{k}), v] = prod_j A[i_j, v]
        rows = (rows[:, None, :] * a[None, :, :]).reshape(-1, g.n)
        out[k] = rows.sum(axis=1).astype(np.int64).reshape((g.n,) * k)
    return out


@dataclass
class ConstructiveBound:
    r: int
    d: int
    n: int
    side: int
    c: Fraction
    lower_bound: int
    exact_count: int
    certificate: bool
    good_sequences: int
    embed_violations: int
    # closed forms are reported through their rd-th powers
    derived_bound_power: Fraction
    reference_bound_power: Fraction
    derived_bound_holds: bool
    drc: DrcReport = field(repr=False)

    @property
    def derived_bound_float(self) -> float:
        p = self.derived_bound_power
        return math.exp(log_fraction(p) / (self.r * self.d)) if p else 0.0

    @property
    def reference_bound_float(self) -> float:
        p = self.reference_bound_power
        return math.exp(log_fraction(p) / (self.r * self.d)) if p else 0.0


def _oriented(h: PatternGraph, side: int) -> PatternGraph:
    return h if side == 1 else h.swapped()


def constructive_bound(h: PatternGraph, g: Graph, c: Fraction | None = None,
                       side: int | None = None, exact: int | None = None,
                       budget: int = DEFAULT_ENUM_BUDGET) -> ConstructiveBound:
    """Integer lower bound on h_H(G) following the embedding argument.

    For every good r-sequence T the complete vertices map to T, the other side
    maps into N(T) by a homomorphism of the neighbourhood hypergraph into the
    thresholded sequence hypergraph on N(T), and each remaining vertex w has
    at least ``edge_min[|N(w)|]`` choices.
    """
    sp = complete_side_params(h) if side is None else side_params(h, side)
    if sp is None or sp.r == 0 or sp.d == 0:
        raise DrcError("pattern has no vertex complete to the other part "
                       "(complete_side_params is none); the bound does not apply")
    hh = _oriented(h, sp.side)
    r, d, n = sp.r, sp.d, h.n
    params = DrcParams(r, d, n, c)
    report = drc_classify(g, params, budget=budget)
    th = report.thresholds
    complete_set = set(sp.complete)
    v2 = list(hh.part2)
    pos2 = {v: i for i, v in enumerate(v2)}
    others = [w for w in hh.part1 if w not in complete_set]
    w_edges = [tuple(sorted(pos2[x] for x in hh.neighbors(w))) for w in others]
    hyper = Hypergraph(len(v2), tuple(sorted(set(w_edges))))
    ks = sorted(set(len(e) for e in hyper.edges))
    per_hom = 1
    for e in w_edges:
        per_hom *= th.edge_min[len(e)]
    sizes = common_size_tensors(g, max(ks, default=0))

    lower = 0
    good_total = 0
    violations = 0
    for support, witness in report.classification.items():
        if witness is not None:
            continue
        tverts = bits(support)
        mult = surj(r, len(tverts))
        nt = bits(common_neighborhood_mask(g, tverts))
        gd = SeqHypergraph.from_threshold(sizes, nt, th.edge_min, ks)
        cnt = hom_count_hyper(hyper, gd)
        if 2 * cnt < len(nt) ** len(v2):
            violations += mult
        lower += mult * cnt * per_hom
        good_total += mult

    if exact is None:
        exact = hom_count(h, g)
    m, n1, n2 = h.edge_count, len(hh.part1), len(v2)
    rd = r * d
    t = report.t_krd
    N = g.n
    # (2^{-1-n2/d} c^{n1-r} t^{m/(rd)} N^n)^{rd}
    derived = Fraction(1, 2 ** (rd + r * n2)) * params.c ** ((n1 - r) * rd) * t**m * N ** (n * rd)
    reference = Fraction(1, (2 * n) ** (2 * n * n * rd)) * t**m * N ** (n * rd)
    return ConstructiveBound(r, d, n, sp.side, params.c, lower, exact, lower <= exact,
                             good_total, violations, derived, reference,
                             Fraction(lower) ** rd >= derived, report)

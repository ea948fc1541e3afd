"""Density inequality reports: Sidorenko-type bounds, tensor powers, correlation.

Bounds with fractional exponents ``m/(rd)`` are decided on ``rd``-th powers,
which keeps every comparison an exact rational one.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .generators import RNG_ALGORITHM, rng
from .graph import (DEFAULT_VERTEX_BUDGET, Graph, GraphError, PatternGraph, as_pattern,
                    build_graph, complete_side_params, relabel_components, tensor_power, width)
from .homcount import (Kernel, density, density_value, hom_count_brute, hom_count_treedp, k2,
                       kab, kernel_density_brute)


@dataclass(frozen=True)
class KrdPowerBound:
    r: int
    d: int
    side: int
    t_krd: Fraction
    # t_H^{rd} / t_{K_{r,d}}^m; >= 1 iff the bound holds
    ratio_power: Fraction | None
    holds: bool


@dataclass(frozen=True)
class WidthBound:
    w: int
    bound: Fraction
    ratio: Fraction | None
    holds: bool


@dataclass(frozen=True)
class SidorenkoReport:
    m: int
    t_h: Fraction
    t_k2: Fraction
    p_power: Fraction
    ratio_conj: Fraction | None
    conjecture_holds: bool
    # True when a theorem guarantees the conjecture verdict for this pattern
    theorem_backed: bool
    degenerate: bool
    krd_power_bound: KrdPowerBound | None
    width_bound: WidthBound

    @property
    def theorem_failures(self) -> list[str]:
        """Names of theorem-backed verdicts that came out false (always a defect)."""
        out = []
        if self.theorem_backed and not self.conjecture_holds:
            out.append("conjecture")
        if self.krd_power_bound is not None and not self.krd_power_bound.holds:
            out.append("krd_power_bound")
        if not self.width_bound.holds:
            out.append("width_bound")
        return out


def _ratio(num: Fraction, den: Fraction) -> Fraction | None:
    return num / den if den else None


def sidorenko_report(h: Graph, host) -> SidorenkoReport:
    h = as_pattern(h)
    m = h.edge_count
    t_h = density_value(h, host)
    t_k2 = density_value(k2(), host)
    p_power = t_k2**m
    degenerate = t_k2 == 0
    backed = m > 0 and all(
        comp.edge_count == 0 or complete_side_params(comp) is not None
        for comp in relabel_components(h))
    krd = None
    sp = complete_side_params(h)
    if sp is not None:
        rd = sp.r * sp.d
        # K_{r,d}: r vertices on the complete side, d on the other
        t_krd = density_value(kab(sp.r, sp.d), host)
        lhs, rhs = t_h**rd, t_krd**m
        krd = KrdPowerBound(sp.r, sp.d, sp.side, t_krd, _ratio(lhs, rhs), lhs >= rhs)
    w = width(h)
    bound = t_k2 ** (m + w)
    wb = WidthBound(w, bound, _ratio(t_h, bound), t_h >= bound)
    return SidorenkoReport(m, t_h, t_k2, p_power, _ratio(t_h, p_power), t_h >= p_power,
                           backed, degenerate, krd, wb)


@dataclass(frozen=True)
class TensorPowerCheck:
    s: int
    t_g: Fraction
    analytic: Fraction
    materialized: Fraction | None
    power_vertices: int
    equal: bool | None


def tensor_power_check(h: Graph, g: Graph, s: int,
                       budget: int = DEFAULT_VERTEX_BUDGET) -> TensorPowerCheck:
    """Compare t_H(G^s) on the materialised power with t_H(G)**s."""
    t = density(h, g).value
    size = g.n**s
    if size > budget:
        return TensorPowerCheck(s, t, t**s, None, size, None)
    gs = tensor_power(g, s, budget)
    direct = density(h, gs).value
    return TensorPowerCheck(s, t, t**s, direct, size, direct == t**s)


# -- correlation -------------------------------------------------------------


def subgraph_from_edges(h: Graph, edges: Iterable[tuple[int, int]]) -> PatternGraph:
    """Subgraph of ``h`` spanned by ``edges`` (only incident vertices kept)."""
    edges = [tuple(sorted(e)) for e in edges]
    verts = sorted(set(v for e in edges for v in e))
    index = {v: i for i, v in enumerate(verts)}
    return build_graph(len(verts), [(index[u], index[v]) for u, v in edges], partition="auto")


def check_partition(h: Graph, parts: Sequence[Sequence[tuple[int, int]]]) -> None:
    own = set(h.edges)
    seen: dict[tuple[int, int], int] = {}
    defects = []
    for i, part in enumerate(parts):
        for e in part:
            e = tuple(sorted(e))
            if e not in own:
                defects.append(f"part {i} uses {e}, which is not an edge of H")
            elif e in seen:
                defects.append(f"edge {e} appears in parts {seen[e]} and {i}")
            else:
                seen[e] = i
    missing = sorted(own - set(seen))
    if missing:
        defects.append("edges not covered: " + ", ".join(map(str, missing)))
    if defects:
        raise GraphError("invalid edge partition: " + "; ".join(defects))


def _is_cycle(g: Graph) -> bool:
    return g.n >= 3 and g.edge_count == g.n and all(x == 2 for x in g.degrees) \
        and len(g.components()) == 1


@dataclass(frozen=True)
class CorrelationRecord:
    t_h: Fraction
    t_parts: tuple[Fraction, ...]
    product: Fraction
    ratio: Fraction | None
    holds: bool
    all_edges: bool
    cycle_plus_edges: bool


def correlation_check(h: Graph, parts: Sequence[Sequence[tuple[int, int]]],
                      host) -> CorrelationRecord:
    check_partition(h, parts)
    subs = [subgraph_from_edges(h, p) for p in parts]
    t_h = density_value(h, host)
    t_parts = tuple(density_value(s, host) for s in subs)
    prod = Fraction(1)
    for x in t_parts:
        prod *= x
    single = [s.edge_count == 1 for s in subs]
    cycles = [_is_cycle(s) for s in subs]
    cycle_case = sum(cycles) == 1 and all(c or e for c, e in zip(cycles, single))
    return CorrelationRecord(t_h, t_parts, prod, _ratio(t_h, prod), t_h >= prod,
                             all(single), cycle_case)


# -- search ------------------------------------------------------------------


@dataclass(frozen=True)
class GraphSpace:
    max_n: int

    def instances(self, seed: int = 0):
        from .corpus import all_graphs
        for g in all_graphs(self.max_n):
            yield f"graph:n={g.n}:" + ",".join(f"{u}-{v}" for u, v in g.edges), g


@dataclass(frozen=True)
class ListSpace:
    """An explicit, ordered list of (code, host) pairs."""

    hosts: tuple

    def instances(self, seed: int = 0):
        yield from self.hosts


def star_plus_clique_space(max_leaves: int, max_clique: int) -> ListSpace:
    """Hosts K_{1,k} + K_c: unbalanced degrees next to a dense regular block."""
    from .generators import complete, star
    from .graph import disjoint_union
    out = []
    for k in range(1, max_leaves + 1):
        for c in range(2, max_clique + 1):
            out.append((f"star{k:03d}+clique{c:03d}", disjoint_union(star(k), complete(c))))
    return ListSpace(tuple(out))


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _kernel_code(w: Kernel) -> str:
    weights = ";".join(",".join(f"{x.numerator}/{x.denominator}" for x in row)
                       for row in w.weights)
    measure = ",".join(f"{x.numerator}/{x.denominator}" for x in w.measure)
    return f"kernel:w={weights}:mu={measure}"


def _symmetric(q: int, upper: Sequence[Fraction]) -> tuple[tuple[Fraction, ...], ...]:
    mat = [[Fraction(0)] * q for _ in range(q)]
    it = iter(upper)
    for i in range(q):
        for j in range(i, q):
            mat[i][j] = mat[j][i] = next(it)
    return tuple(tuple(row) for row in mat)


@dataclass(frozen=True)
class KernelGridSpace:
    """q-block kernels with weights in {0..levels}/levels and measures in (1/mass_levels)Z."""

    q: int
    levels: int
    mass_levels: int

    def instances(self, seed: int = 0):
        cells = self.q * (self.q + 1) // 2
        grid = [Fraction(i, self.levels) for i in range(self.levels + 1)]
        measures = [tuple(Fraction(x, self.mass_levels) for x in comp)
                    for comp in _compositions(self.mass_levels, self.q)]
        for upper in itertools.product(grid, repeat=cells):
            weights = _symmetric(self.q, upper)
            for mu in measures:
                w = Kernel(weights, mu)
                yield _kernel_code(w), w


@dataclass(frozen=True)
class ConstantKernelSpace:
    levels: int

    def instances(self, seed: int = 0):
        for i in range(1, self.levels + 1):
            w = Kernel.constant(Fraction(i, self.levels))
            yield _kernel_code(w), w


@dataclass(frozen=True)
class LocalSearchSpace:
    """Seeded hill climbing over q-block kernels on a rational grid."""

    q: int
    denominator: int
    restarts: int = 4
    steps: int = 200

    def instances(self, seed: int = 0):
        # the generator is driven by the caller: it sends back each ratio
        raise TypeError("LocalSearchSpace is driven by correlation_search directly")


@dataclass
class SearchRecord:
    space: str
    evaluated: int
    exhausted: bool
    best_code: str | None
    best_ratio: Fraction | None
    counterexample: bool
    rechecked: bool | None
    skipped_zero: int
    rng_algorithm: str | None = None
    seed: int | None = None
    trace: list[str] = field(default_factory=list, repr=False)


def _ratio_for(h, subs, host) -> Fraction | None:
    prod = Fraction(1)
    for s in subs:
        prod *= density_value(s, host)
        if not prod:
            return None
    return density_value(h, host) / prod


def _recheck(h, subs, host) -> Fraction | None:
    """Recompute the ratio with the second engine of each route."""
    if isinstance(host, Kernel):
        vals = [kernel_density_brute(x, host) for x in [h, *subs]]
    else:
        vals = [Fraction(hom_count_brute(x, host), host.n**x.n) for x in [h, *subs]]
        tree = [Fraction(hom_count_treedp(x, host), host.n**x.n) for x in [h, *subs]]
        if tree != vals:
            return None
    prod = Fraction(1)
    for v in vals[1:]:
        prod *= v
    return vals[0] / prod if prod else None


def _better(ratio, code, best_ratio, best_code) -> bool:
    if best_ratio is None:
        return True
    return (ratio, code) < (best_ratio, best_code)


def correlation_search(h: Graph, parts, space, budget: int = 100_000,
                       seed: int = 0) -> SearchRecord:
    """Minimise t_H / prod t_{H_i} over a declared space of hosts.

    Hosts where the product vanishes are skipped and counted.  Ties go to the
    lexicographically smallest instance code, so reruns are identical.
    """
    check_partition(h, parts)
    subs = [subgraph_from_edges(h, p) for p in parts]
    if isinstance(space, LocalSearchSpace):
        return _local_search(h, subs, space, budget, seed)
    best_ratio = best_code = best_host = None
    evaluated = skipped = 0
    exhausted = True
    for code, host in space.instances(seed):
        if evaluated >= budget:
            exhausted = False
            break
        evaluated += 1
        ratio = _ratio_for(h, subs, host)
        if ratio is None:
            skipped += 1
            continue
        if _better(ratio, code, best_ratio, best_code):
            best_ratio, best_code, best_host = ratio, code, host
    if evaluated == 0:
        raise ValueError("search space is empty")
    return _finish(type(space).__name__, evaluated, exhausted, best_code, best_ratio,
                   best_host, h, subs, skipped, None)


def _finish(name, evaluated, exhausted, code, ratio, host, h, subs, skipped, seed,
            trace=None) -> SearchRecord:
    counter = ratio is not None and ratio < 1
    rechecked = None
    if counter:
        rechecked = _recheck(h, subs, host) == ratio
    return SearchRecord(name, evaluated, exhausted, code, ratio, counter and bool(rechecked),
                        rechecked, skipped, RNG_ALGORITHM if seed is not None else None, seed,
                        trace or [])


def _local_search(h, subs, space: LocalSearchSpace, budget: int, seed: int) -> SearchRecord:
    gen = rng(seed)
    q, D = space.q, space.denominator
    cells = q * (q + 1) // 2
    best_ratio = best_code = best_host = None
    evaluated = skipped = 0

    def make(upper, masses):
        return Kernel(_symmetric(q, [Fraction(int(x), D) for x in upper]),
                      tuple(Fraction(int(x), D) for x in masses))

    def evaluate(upper, masses):
        nonlocal evaluated, skipped
        w = make(upper, masses)
        evaluated += 1
        ratio = _ratio_for(h, subs, w)
        if ratio is None:
            skipped += 1
        return ratio, _kernel_code(w), w

    for _ in range(space.restarts):
        if evaluated >= budget:
            break
        upper = [int(x) for x in gen.integers(0, D + 1, size=cells)]
        cuts = sorted(int(x) for x in gen.integers(0, D + 1, size=q - 1))
        masses = [b - a for a, b in zip([0] + cuts, cuts + [D])]
        cur, code, w = evaluate(upper, masses)
        for _ in range(space.steps):
            if evaluated >= budget:
                break
            cand_u, cand_m = list(upper), list(masses)
            if gen.integers(0, 2) == 0:
                i = int(gen.integers(0, cells))
                cand_u[i] = min(D, max(0, cand_u[i] + int(gen.choice([-1, 1]))))
            else:
                i, j = (int(x) for x in gen.choice(q, size=2, replace=False))
                if cand_m[i] == 0:
                    continue
                cand_m[i] -= 1
                cand_m[j] += 1
            ratio, ccode, cw = evaluate(cand_u, cand_m)
            if ratio is not None and (cur is None or ratio <= cur):
                upper, masses, cur, code, w = cand_u, cand_m, ratio, ccode, cw
        if cur is not None and _better(cur, code, best_ratio, best_code):
            best_ratio, best_code, best_host = cur, code, w
    return _finish("LocalSearchSpace", evaluated, False, best_code, best_ratio, best_host,
                   h, subs, skipped, seed)

"""Finite-sample quasirandomness battery and forcing experiments.

Densities are matched to powers of p up to explicit relative tolerances
(default 5%).  A finite family can refute forcing at a tolerance, never
establish it, so experiment records say "consistent with forcing" at most.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .generators import GenSpec, generate
from .graph import Graph, GraphError, PatternGraph, as_pattern, strip_leaves
from .homcount import codegree_matrix, contract, density, hom_count, k2

DEFAULT_TOL = Fraction(1, 20)


def c4():
    from .generators import cycle
    return cycle(4)


@dataclass(frozen=True)
class QuasiReport:
    p_ref: Fraction
    t_k2: Fraction
    t_c4: Fraction
    dev_edge: Fraction
    dev_c4: Fraction
    dev_codeg: Fraction
    tol_edge: Fraction
    tol_c4: Fraction
    tol_codeg: Fraction
    pass_edge: bool
    pass_c4: bool
    pass_codeg: bool
    # diagnostic only: the same deviation on copies (injective maps) of C4
    dev_c4_copies: Fraction | None = None

    @property
    def passed(self) -> bool:
        """Edge and C4 criteria; codegree is reported separately."""
        return self.pass_edge and self.pass_c4


def codegree_deviation(g: Graph, p: Fraction) -> Fraction:
    """Sum over ordered pairs of |codeg(u,v) - p^2 N|, normalised by N^2 * p^2 N."""
    n = g.n
    target = p * p * n
    hist = np.bincount(codegree_matrix(g).ravel(), minlength=1)
    total = sum(int(cnt) * abs(c - target) for c, cnt in enumerate(hist) if cnt)
    return Fraction(total) / (n * n * target)


def quasirandom_battery(g: Graph, p="auto", tol_edge=DEFAULT_TOL, tol_c4=DEFAULT_TOL,
                        tol_codeg=DEFAULT_TOL) -> QuasiReport:
    if g.n < 2:
        raise GraphError("the battery needs at least 2 vertices")
    t_k2 = density(k2(), g).value
    p = t_k2 if p == "auto" else Fraction(p)
    if p == 0:
        raise GraphError("reference density p must be positive")
    t_c4 = density(c4(), g).value
    dev_edge = abs(t_k2 - p) / p
    dev_c4 = abs(t_c4 - p**4) / p**4
    dev_codeg = codegree_deviation(g, p)
    tol_edge, tol_c4, tol_codeg = (Fraction(x) for x in (tol_edge, tol_c4, tol_codeg))
    return QuasiReport(p, t_k2, t_c4, dev_edge, dev_c4, dev_codeg, tol_edge, tol_c4, tol_codeg,
                       dev_edge <= tol_edge, dev_c4 <= tol_c4, dev_codeg <= tol_codeg,
                       c4_copy_deviation(g, t_c4, p))


def c4_copy_deviation(g: Graph, t_c4: Fraction, p: Fraction) -> Fraction | None:
    """|copy density of C4 - p^4| / p^4, with degenerate closed walks removed."""
    n = g.n
    if n < 4:
        return None
    hom = t_c4 * n**4
    degs = g.degrees
    inj = hom - 2 * sum(d * d for d in degs) + sum(degs)
    dens = inj / (n * (n - 1) * (n - 2) * (n - 3))
    return abs(dens - p**4) / p**4


@dataclass(frozen=True)
class FamilyMember:
    spec: str
    n: int
    p: Fraction
    t_h: Fraction
    p_power: Fraction
    dev_h: Fraction
    battery: QuasiReport
    premise: bool
    conclusion: bool


@dataclass
class ForcingExperiment:
    pattern_edges: int
    members: list[FamilyMember] = field(default_factory=list)

    @property
    def premise_all(self) -> bool:
        return all(x.premise for x in self.members)

    @property
    def conclusion_all(self) -> bool:
        return all(x.conclusion for x in self.members)

    @property
    def refutes_at_tolerance(self) -> bool:
        """Some member satisfies the premise while failing the battery."""
        return any(x.premise and not x.conclusion for x in self.members)

    @property
    def verdict(self) -> str:
        if self.refutes_at_tolerance:
            return "premise holds but battery fails: not forcing at this tolerance"
        if not any(x.premise for x in self.members):
            return "premise fails on every member: consistent with forcing"
        return "consistent with forcing"


def forcing_experiment(h: Graph, family: Sequence[GenSpec | Graph], p="auto",
                       tol_edge=DEFAULT_TOL, tol_h=DEFAULT_TOL,
                       tol_c4=DEFAULT_TOL) -> ForcingExperiment:
    """Check whether K2- and H-densities near p, p^m come with a passing battery."""
    if not family:
        raise ValueError("family is empty")
    h = as_pattern(h)
    m = h.edge_count
    out = ForcingExperiment(m)
    for item in family:
        g = generate(item) if isinstance(item, GenSpec) else item
        name = item.describe() if isinstance(item, GenSpec) else f"graph:n={g.n}"
        battery = quasirandom_battery(g, p, tol_edge=tol_edge, tol_c4=tol_c4)
        pr = battery.p_ref
        t_h = density(h, g).value
        dev_h = abs(t_h - pr**m) / pr**m
        premise = battery.pass_edge and dev_h <= Fraction(tol_h)
        out.members.append(FamilyMember(name, g.n, pr, t_h, pr**m, dev_h, battery, premise,
                                        battery.passed))
    return out


@dataclass(frozen=True)
class DegreeDeviation:
    p: Fraction
    epsilon: Fraction
    n: int
    sum_delta: Fraction
    sum_delta_sq: Fraction
    deviant_count: int
    h_k12: int
    expansion: Fraction
    identity_holds: bool
    # t_{K_{1,2}} - p^2 compared with epsilon^3 p^2
    excess: Fraction
    eps3_p2: Fraction


def degree_concentration(g: Graph, p, epsilon) -> DegreeDeviation:
    p, eps = Fraction(p), Fraction(epsilon)
    if not 0 < eps < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    n = g.n
    pn = p * n
    delta = [d - pn for d in g.degrees]
    s1 = sum(delta, Fraction(0))
    s2 = sum((x * x for x in delta), Fraction(0))
    h = sum(d * d for d in g.degrees)
    expansion = p * p * n**3 + 2 * pn * s1 + s2
    deviant = sum(1 for d in g.degrees if d < (1 - eps) * pn)
    return DegreeDeviation(p, eps, n, s1, s2, deviant, h, expansion, expansion == h,
                           Fraction(h, n**3) - p * p, eps**3 * p * p)


@dataclass(frozen=True)
class LeafExtension:
    leaves: int
    applicable: bool
    h_h: int
    h_core: int
    extension_sum: int | None
    min_degree: int
    weak_bound: int | None
    holds: bool


def leaf_extension(h: PatternGraph, g: Graph) -> LeafExtension:
    """Compare h_H(G) with extensions of core homomorphisms by the leaves.

    Each leaf hangs off a core vertex x, and can go to any neighbour of the
    image of x, so the sum over core homomorphisms of prod deg(image) equals
    h_H(G); the weaker bound min_deg^s * h_core(G) follows.
    """
    h = as_pattern(h)
    core, s = strip_leaves(h)
    keep = [v for v in range(h.n) if h.degrees[v] >= 2]
    index = {v: i for i, v in enumerate(keep)}
    hosts: dict[int, int] = {}
    applicable = bool(keep)
    for v in range(h.n):
        if h.degrees[v] != 1:
            continue
        (x,) = h.neighbors(v)
        if x not in index:
            applicable = False
            break
        hosts[index[x]] = hosts.get(index[x], 0) + 1
    h_h = hom_count(h, g)
    min_deg = min(g.degrees) if g.n else 0
    if not applicable:
        return LeafExtension(s, False, h_h, 0, None, min_deg, None, True)
    h_core = hom_count(core, g)
    degs = np.array(g.degrees, dtype=object)
    unary = {v: degs**cnt for v, cnt in hosts.items()}
    ext = int(contract(core, g.adjacency.astype(object), unary=unary))
    weak = min_deg**s * h_core
    return LeafExtension(s, True, h_h, h_core, ext, min_deg, weak, ext == h_h and weak <= h_h)

"""Seeded graph families and named pattern shorthands.

Every random family draws from ``numpy.random.Generator(PCG64(seed))``; the
identifier in ``RNG_ALGORITHM`` is written into every report so runs can be
replayed.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from .graph import Graph, GraphError, PatternGraph, build_graph, disjoint_union, two_coloring

RNG_ALGORITHM = f"numpy.random.PCG64 (numpy {np.__version__})"

FAMILIES = ("gnp", "random_bipartite", "complete", "complete_bipartite", "path", "cycle",
            "star", "hypercube", "paley", "two_cliques", "blow_up")


def rng(seed: int) -> np.random.Generator:
    if seed is None:
        raise ValueError("a seed is required")
    return np.random.Generator(np.random.PCG64(int(seed) & (2**64 - 1)))


def is_prime(q: int) -> bool:
    if q < 2:
        return False
    if q % 2 == 0:
        return q == 2
    f = 3
    while f * f <= q:
        if q % f == 0:
            return False
        f += 2
    return True


def _fraction(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(str(x))


@dataclass(frozen=True)
class GenSpec:
    family: str
    params: dict[str, Any] = field(default_factory=dict)
    seed: int = 0

    def describe(self) -> str:
        items = ",".join(f"{k}={self.params[k]}" for k in sorted(self.params))
        return f"{self.family}:{items};seed={self.seed}"


def complete(n: int) -> Graph:
    return build_graph(n, [(u, v) for u in range(n) for v in range(u + 1, n)])


def complete_bipartite(a: int, b: int) -> PatternGraph:
    return build_graph(a + b, [(i, a + j) for i in range(a) for j in range(b)],
                       partition=(range(a), range(a, a + b)))


def path(k: int) -> PatternGraph:
    """P_k: the path with k edges."""
    return build_graph(k + 1, [(i, i + 1) for i in range(k)], partition="auto")


def cycle(n: int) -> Graph:
    g = build_graph(n, [(i, (i + 1) % n) for i in range(n)])
    return build_graph(n, g.edges, partition="auto") if n % 2 == 0 else g


def star(k: int) -> PatternGraph:
    """S_k: centre 0 joined to k leaves."""
    return build_graph(k + 1, [(0, i) for i in range(1, k + 1)],
                       partition=([0], range(1, k + 1)))


def hypercube(d: int) -> PatternGraph:
    n = 1 << d
    edges = [(u, u ^ (1 << i)) for u in range(n) for i in range(d) if u < u ^ (1 << i)]
    return build_graph(n, edges, partition="auto")


def paley(q: int) -> Graph:
    if not (is_prime(q) and q % 4 == 1):
        raise GraphError(f"paley needs a prime q = 1 mod 4, got {q}")
    residues = {x * x % q for x in range(1, q)}
    return build_graph(q, [(x, y) for x in range(q) for y in range(x + 1, q)
                           if (y - x) % q in residues])


def two_cliques(n: int) -> Graph:
    """Disjoint union of K_{floor(n/2)} and K_{ceil(n/2)}."""
    a = n // 2
    return disjoint_union(complete(a), complete(n - a))


def _bernoulli(gen: np.random.Generator, p: Fraction, size: int) -> np.ndarray:
    # uniform integers below the denominator make the success probability exactly p
    if p.denominator >= 2**62:
        raise GraphError("edge probability denominator is too large")
    return gen.integers(0, p.denominator, size=size, dtype=np.int64) < p.numerator


def gnp(n: int, p, seed: int) -> Graph:
    p = _fraction(p)
    if not 0 <= p <= 1:
        raise GraphError(f"edge probability {p} is outside [0, 1]")
    iu = np.triu_indices(n, 1)
    keep = _bernoulli(rng(seed), p, len(iu[0]))
    a = np.zeros((n, n), dtype=bool)
    a[iu[0][keep], iu[1][keep]] = True
    return Graph.from_adjacency(a | a.T)


def random_bipartite(n1: int, n2: int, p, seed: int) -> PatternGraph:
    p = _fraction(p)
    if not 0 <= p <= 1:
        raise GraphError(f"edge probability {p} is outside [0, 1]")
    keep = _bernoulli(rng(seed), p, n1 * n2).reshape(n1, n2)
    edges = [(i, n1 + j) for i, j in zip(*np.nonzero(keep))]
    return build_graph(n1 + n2, [(int(u), int(v)) for u, v in edges],
                       partition=(range(n1), range(n1, n1 + n2)))


def blow_up(base: Graph, t: int) -> Graph:
    """Replace each vertex by an independent set of size t; edges become K_{t,t}."""
    edges = [(u * t + i, v * t + j) for u, v in base.edges for i in range(t) for j in range(t)]
    return build_graph(base.n * t, edges)


def _positive(spec: GenSpec, *names: str) -> list[int]:
    out = []
    for name in names:
        if name not in spec.params:
            raise GraphError(f"{spec.family} needs parameter {name!r}")
        value = int(spec.params[name])
        if value <= 0:
            raise GraphError(f"{spec.family}: {name} must be positive, got {value}")
        out.append(value)
    return out


def generate(spec: GenSpec) -> Graph:
    f = spec.family
    p = spec.params
    if f == "gnp":
        (n,) = _positive(spec, "n")
        return gnp(n, p["p"], spec.seed)
    if f == "random_bipartite":
        n1, n2 = _positive(spec, "n1", "n2")
        return random_bipartite(n1, n2, p["p"], spec.seed)
    if f == "complete":
        return complete(*_positive(spec, "n"))
    if f == "complete_bipartite":
        return complete_bipartite(*_positive(spec, "a", "b"))
    if f == "path":
        return path(*_positive(spec, "k"))
    if f == "cycle":
        (n,) = _positive(spec, "n")
        if n < 3:
            raise GraphError(f"cycle needs n >= 3, got {n}")
        return cycle(n)
    if f == "star":
        return star(*_positive(spec, "k"))
    if f == "hypercube":
        return hypercube(*_positive(spec, "d"))
    if f == "paley":
        return paley(*_positive(spec, "q"))
    if f == "two_cliques":
        return two_cliques(*_positive(spec, "n"))
    if f == "blow_up":
        (t,) = _positive(spec, "t")
        base = p["base"]
        base_graph = base if isinstance(base, Graph) else parse_pattern(str(base))
        return blow_up(base_graph, t)
    raise GraphError(f"unknown family {f!r}; known: {', '.join(FAMILIES)}")


def perturb(g: Graph, flips: int, seed: int) -> Graph:
    """Toggle ``flips`` distinct vertex pairs chosen by the seeded stream."""
    pairs = g.n * (g.n - 1) // 2
    if not 0 <= flips <= pairs:
        raise GraphError(f"cannot flip {flips} of {pairs} vertex pairs")
    if flips == 0:
        return g
    chosen = rng(seed).choice(pairs, size=flips, replace=False)
    iu = np.triu_indices(g.n, 1)
    rows = list(g.rows)
    for idx in sorted(int(i) for i in chosen):
        u, v = int(iu[0][idx]), int(iu[1][idx])
        rows[u] ^= 1 << v
        rows[v] ^= 1 << u
    return Graph(g.n, tuple(rows))


# -- named shorthands --------------------------------------------------------

_SHORTHAND = re.compile(
    r"^(?:K_?\{?(?P<a>\d+),(?P<b>\d+)\}?"
    r"|K_?\{?(?P<kn>\d+)\}?"
    r"|P_?\{?(?P<pk>\d+)\}?"
    r"|C_?\{?(?P<cn>\d+)\}?"
    r"|S_?\{?(?P<sk>\d+)\}?"
    r"|Q_?\{?(?P<qd>\d+)\}?)$")


def parse_pattern(text: str) -> Graph:
    """Expand K2, K_n, P_k, C_k, K_{a,b}, S_k, Q_d, and unions joined by ``+``.

    Bipartite results come back as PatternGraph.
    """
    text = text.strip().replace(" ", "")
    if "+" in text:
        return disjoint_union(*(parse_pattern(t) for t in text.split("+")))
    m = _SHORTHAND.match(text)
    if not m:
        raise GraphError(f"unrecognised pattern shorthand {text!r}")
    if m["a"]:
        return complete_bipartite(int(m["a"]), int(m["b"]))
    if m["kn"]:
        n = int(m["kn"])
        g = complete(n)
        return build_graph(n, g.edges, partition="auto") if n <= 2 else g
    if m["pk"]:
        return path(int(m["pk"]))
    if m["cn"]:
        n = int(m["cn"])
        if n < 3:
            raise GraphError("cycles need at least 3 vertices")
        return cycle(n)
    if m["sk"]:
        return star(int(m["sk"]))
    return hypercube(int(m["qd"]))


def is_bipartite(g: Graph) -> bool:
    try:
        two_coloring(g)
    except GraphError:
        return False
    return True

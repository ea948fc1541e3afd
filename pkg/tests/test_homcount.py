import itertools
import random
import warnings
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from homdensity.corpus import all_graphs, bipartite_patterns
from homdensity.generators import complete, cycle, gnp, hypercube, parse_pattern, path, star
from homdensity.graph import GraphError, build_graph, disjoint_union, tensor_product
from homdensity.homcount import (Density, EngineError, Kernel, applicable_engines,
                                 closed_walk_count, density, hom_count, hom_count_brute,
                                 hom_count_closed_form, hom_count_treedp, injective_count,
                                 injective_density, k2, kab, kab_count, kernel_density,
                                 kernel_density_brute, recognize, walk_count)


def naive_hom(h, g) -> int:
    """Oracle: try every map V(H) -> V(G)."""
    return sum(all(g.adjacent(f[u], f[v]) for u, v in h.edges)
               for f in itertools.product(range(g.n), repeat=h.n))


def test_brute_examples():
    assert hom_count_brute(k2(), complete(3)) == 6
    assert hom_count_brute(cycle(4), complete(3)) == 18
    assert hom_count_brute(path(2), star(2)) == 6


def test_treedp_examples():
    assert hom_count_treedp(cycle(4), complete(3)) == 18
    g = gnp(30, "1/3", 4)
    assert hom_count_treedp(k2(), g) == 2 * g.edge_count


def test_c6_into_c6():
    # eigenvalues of C6 are 2,1,-1,-2,-1,1, so tr(A^6) = 64+1+1+64+1+1
    c6 = cycle(6)
    assert hom_count_brute(c6, c6) == 132
    assert hom_count_treedp(c6, c6) == 132
    assert hom_count_closed_form(c6, c6) == 132
    assert naive_hom(c6, c6) == 132
    eig = np.linalg.eigvalsh(c6.adjacency.astype(float))
    assert round(float((eig**6).sum())) == 132
    # the automorphisms are only the 12 injective ones
    assert injective_count(c6, c6) == 12


def test_closed_form_examples():
    assert hom_count_closed_form(cycle(4), cycle(5)) == 30
    assert kab_count(star(2), 2, 1) == 6
    assert hom_count_closed_form(parse_pattern("K_{1,2}"), star(2)) == 6
    for k in range(1, 8):
        assert hom_count_closed_form(path(3), star(k)) == 2 * k * k


def test_closed_form_rejects_other_shapes():
    with pytest.raises(EngineError):
        hom_count_closed_form(hypercube(3), complete(3))


def test_recognize():
    assert recognize(path(3)).kind == "path"
    assert recognize(cycle(6)).kind == "cycle"
    s = recognize(parse_pattern("K_{2,3}"))
    assert (s.kind, s.a, s.b) == ("kab", 3, 2)
    assert recognize(hypercube(3)) is None


def test_density_examples():
    assert density(k2(), complete(4)).value == Fraction(3, 4)
    assert density(cycle(4), complete(3)).value == Fraction(2, 9)
    assert density(path(3), star(2)).value == Fraction(8, 81)
    d = density(cycle(4), complete(3))
    assert isinstance(d, Density) and (d.count, d.base, d.exponent) == (18, 3, 4)
    assert float(d) == pytest.approx(2 / 9, rel=1e-15)


def test_density_rejects_empty_host():
    with pytest.raises(GraphError):
        density(k2(), build_graph(0, []))


def test_kernel_examples():
    for p in (Fraction(1, 3), Fraction(7, 10), Fraction(1)):
        w = Kernel.constant(p)
        for h in (k2(), cycle(4), hypercube(3), path(5)):
            assert kernel_density(h, w) == p**h.edge_count
    w = Kernel([[0, 1], [1, 1]], [Fraction(1, 2), Fraction(1, 2)])
    assert kernel_density(path(1), w) == Fraction(3, 4)
    assert kernel_density(path(2), w) == Fraction(5, 8)
    assert kernel_density(path(3), w) == Fraction(1, 2)
    for h in (path(1), path(2), path(3), cycle(4)):
        assert kernel_density(h, w) == kernel_density_brute(h, w)


def test_kernel_validation():
    with pytest.raises(ValueError, match="symmetric"):
        Kernel([[0, 1], [0, 0]], [Fraction(1, 2), Fraction(1, 2)])
    with pytest.raises(ValueError, match="sums"):
        Kernel([[1]], [Fraction(1, 2)])
    with pytest.raises(ValueError, match="negative"):
        Kernel([[-1]], [1])


def test_kernel_graph_consistency():
    for g in all_graphs(5)[::3]:
        w = Kernel.from_graph(g)
        for h in bipartite_patterns(4):
            assert kernel_density(h, w) == density(h, g).value


def test_injective_examples():
    assert injective_density(k2(), complete(3)) == 1
    assert injective_density(cycle(4), cycle(4)) == Fraction(1, 3)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        assert injective_density(cycle(4), complete(3)) == 0
    assert caught


def test_injective_equals_hom_for_k2():
    for g in all_graphs(6)[::5]:
        assert injective_count(k2(), g) == hom_count(k2(), g)


def test_engine_agreement_sample():
    rnd = random.Random(1)
    hosts = rnd.sample(all_graphs(6), 40)
    for h in bipartite_patterns(5):
        for g in hosts:
            counts = applicable_engines(h, g)
            assert len(set(counts.values())) == 1, (h.edges, g.edges, counts)
            if h.n <= 4 and g.n <= 5:
                assert counts["brute"] == naive_hom(h, g)


def test_nonbipartite_patterns_agree():
    for h in all_graphs(5, 3)[::4]:
        for g in all_graphs(5)[::9]:
            assert hom_count_brute(h, g) == hom_count_treedp(h, g)


def test_walk_counts_large():
    g = gnp(120, "1/2", 9)
    a = g.adjacency.astype(object)
    ones = np.ones(g.n, dtype=object)
    assert walk_count(g, 3) == int(ones @ a @ a @ a @ ones)
    assert closed_walk_count(g, 4) == int(np.trace(a @ a @ a @ a))


def test_kab_methods_agree():
    for g in all_graphs(6)[::11]:
        for a, b in itertools.product((1, 2, 3), repeat=2):
            vals = {m: kab_count(g, a, b, method=m) for m in ("sequences", "multisets", "auto")}
            assert len(set(vals.values())) == 1
            assert vals["sequences"] == hom_count_brute(kab(a, b), g)
    g = gnp(60, "1/2", 2)
    assert kab_count(g, 2, 2) == kab_count(g, 2, 2, method="multisets")


def test_brute_cap():
    with pytest.raises(EngineError, match="cap"):
        hom_count_brute(path(12), complete(2))


def test_treedp_fallback_notice():
    with pytest.warns(RuntimeWarning, match="falling back"):
        assert hom_count_treedp(cycle(4), complete(3), max_width=1) == 18


def test_parallel_split_identical():
    g = gnp(14, "1/2", 3)
    h = hypercube(3)
    assert hom_count_brute(h, g, workers=2) == hom_count_brute(h, g, workers=1)


def test_disjoint_union_factorises():
    parts = [cycle(4), path(2), k2()]
    h = disjoint_union(*parts)
    for g in all_graphs(5)[::13]:
        prod = Fraction(1)
        for p in parts:
            prod *= density(p, g).value
        assert density(h, g).value == prod


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_adding_edge_never_increases_density(seed):
    rnd = random.Random(seed)
    h = rnd.choice(all_graphs(5, 3))
    non = [(u, v) for u in range(h.n) for v in range(u + 1, h.n) if not h.adjacent(u, v)]
    if not non:
        return
    bigger = build_graph(h.n, list(h.edges) + [rnd.choice(non)])
    g = rnd.choice(all_graphs(6))
    assert density(bigger, g).value <= density(h, g).value


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_tensor_multiplicativity_property(seed):
    rnd = random.Random(seed)
    h = rnd.choice(all_graphs(4))
    f, g = rnd.choice(all_graphs(5)), rnd.choice(all_graphs(5))
    assert density(h, tensor_product(f, g)).value == density(h, f).value * density(h, g).value


def test_large_counts_exact():
    g = complete(2000)
    # eigenvalues: 1999 once, -1 with multiplicity 1999
    assert hom_count(cycle(4), g) == 1999**4 + 1999

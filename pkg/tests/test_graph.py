import random

import pytest
from hypothesis import given, settings, strategies as st

from homdensity.corpus import all_graphs, bipartite_patterns
from homdensity.generators import complete, cycle, hypercube, parse_pattern, star
from homdensity.graph import (BudgetError, Graph, GraphError, PatternGraph, build_graph,
                              common_neighborhood, complete_side_params, disjoint_union,
                              side_params, strip_leaves, tensor_power, tensor_product, width)


def test_build_k3():
    g = build_graph(3, [(0, 1), (1, 2), (2, 0)])
    assert g.edge_count == 3
    assert not isinstance(g, PatternGraph)


def test_build_c4_partition():
    g = build_graph(4, [(0, 1), (1, 2), (2, 3), (3, 0)], partition="auto")
    assert isinstance(g, PatternGraph)
    assert {frozenset(g.part1), frozenset(g.part2)} == {frozenset({0, 2}), frozenset({1, 3})}


def test_odd_cycle_named():
    with pytest.raises(GraphError, match="0-1-2"):
        build_graph(3, [(0, 1), (1, 2), (2, 0)], partition="auto")


@pytest.mark.parametrize("edges,fragment", [([(0, 0)], "(0, 0)"), ([(0, 5)], "(0, 5)")])
def test_bad_pairs_named(edges, fragment):
    with pytest.raises(GraphError, match=fragment.replace("(", r"\(").replace(")", r"\)")):
        build_graph(3, edges)


def test_duplicate_edges_collapse():
    assert build_graph(3, [(0, 1), (1, 0), (0, 1)]).edge_count == 1


def test_declared_partition_checked():
    with pytest.raises(GraphError):
        build_graph(3, [(0, 1), (1, 2)], partition=([0, 1], [2]))


def test_common_neighborhood_examples():
    c4 = cycle(4)
    k3 = complete(3)
    assert common_neighborhood(c4, (0, 2)) == {1, 3}
    assert common_neighborhood(k3, (0, 1)) == {2}
    assert common_neighborhood(k3, ()) == {0, 1, 2}
    with pytest.raises(GraphError):
        common_neighborhood(k3, (3,))


graphs_small = st.integers(1, 7).flatmap(
    lambda n: st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=15)
    .map(lambda es: build_graph(n, [(u, v) for u, v in es if u != v])))


@settings(max_examples=60, deadline=None)
@given(graphs_small, st.data())
def test_common_neighborhood_set_invariance(g, data):
    seq = data.draw(st.lists(st.integers(0, g.n - 1), max_size=4))
    shuffled = list(seq) + list(seq[:1])
    random.Random(0).shuffle(shuffled)
    assert common_neighborhood(g, seq) == common_neighborhood(g, shuffled)
    ext = data.draw(st.lists(st.integers(0, g.n - 1), max_size=3))
    assert len(common_neighborhood(g, seq + ext)) <= len(common_neighborhood(g, seq))


def test_tensor_examples():
    k2 = complete(2)
    m = tensor_product(k2, k2)
    assert m.n == 4 and m.edge_count == 2 and all(d == 1 for d in m.degrees)
    g = cycle(5)
    e = tensor_product(g, complete(1))
    assert e.n == 5 and e.edge_count == 0
    k33 = tensor_product(complete(3), complete(3))
    assert k33.n == 9 and k33.edge_count == 18 and set(k33.degrees) == {4}


def test_tensor_degree_identity_exhaustive():
    small = all_graphs(4)
    for f in small:
        for g in small:
            p = tensor_product(f, g)
            for a in range(f.n):
                for b in range(g.n):
                    assert p.degrees[a * g.n + b] == f.degrees[a] * g.degrees[b]


def test_tensor_degree_identity_five_vertices():
    fives = all_graphs(5, 5)
    rnd = random.Random(5)
    for f, g in [(rnd.choice(fives), rnd.choice(fives)) for _ in range(40)]:
        p = tensor_product(f, g)
        assert all(p.degrees[a * g.n + b] == f.degrees[a] * g.degrees[b]
                   for a in range(f.n) for b in range(g.n))


def test_tensor_budget():
    with pytest.raises(BudgetError, match="100"):
        tensor_power(complete(11), 2, budget=100)
    assert tensor_power(complete(3), 1).edges == complete(3).edges


def test_width_examples():
    assert width(parse_pattern("K_{2,3}")) == 0
    assert width(cycle(6)) == 1
    assert width(disjoint_union(cycle(6), cycle(6))) == 2
    assert width(build_graph(3, [(0, 1)], partition="auto")) == 0


def _has_complete_vertex(comp: PatternGraph) -> bool:
    for side, other in ((comp.part1, comp.part2), (comp.part2, comp.part1)):
        for v in side:
            if all(comp.adjacent(v, u) for u in other):
                return True
    return False


def test_width_zero_characterisation():
    for h in bipartite_patterns(7, connected=False):
        comps = []
        for comp in h.components():
            idx = sorted(comp)
            pos = {v: i for i, v in enumerate(idx)}
            sub = build_graph(len(idx), [(pos[u], pos[v]) for u, v in h.edges if u in pos],
                              partition=([pos[v] for v in h.part1 if v in pos],
                                         [pos[v] for v in h.part2 if v in pos]))
            comps.append(sub)
        expected = all(_has_complete_vertex(c) for c in comps if c.edge_count)
        assert (width(h) == 0) == expected, h.edges


def test_complete_side_iff_width_zero_connected():
    for h in bipartite_patterns(7):
        assert (complete_side_params(h) is not None) == (width(h) == 0)


def test_complete_side_examples():
    sp = complete_side_params(cycle(4))
    assert (sp.r, sp.d) == (2, 2)
    k13 = star(3)
    first = side_params(k13, 1)
    assert (first.r, first.d) == (1, 3)
    assert complete_side_params(hypercube(3)) is None


def test_strip_leaves_examples():
    c4p = build_graph(5, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 4)], partition="auto")
    core, s = strip_leaves(c4p)
    assert (core.n, core.edge_count, s) == (4, 4, 1)
    core, s = strip_leaves(cycle(4))
    assert (core.n, s) == (4, 0)
    core, s = strip_leaves(star(3))
    assert (core.n, core.edge_count, s) == (1, 0, 3)


def test_strip_leaves_single_pass():
    core, s = strip_leaves(parse_pattern("P_4"))
    # P4 loses its two ends only; the new ends stay
    assert (core.n, core.edge_count, s) == (3, 2, 2)


def test_graph_validation():
    with pytest.raises(GraphError):
        Graph(2, (0b10, 0))  # asymmetric
    with pytest.raises(GraphError):
        Graph(2, (0b01, 0))  # loop


def test_adjacency_readonly():
    a = complete(3).adjacency
    with pytest.raises(ValueError):
        a[0, 0] = 1


def test_from_adjacency_roundtrip():
    for g in all_graphs(5)[::7]:
        assert Graph.from_adjacency(g.adjacency).rows == g.rows


def test_components_and_complement():
    g = disjoint_union(complete(2), complete(3))
    assert sorted(len(c) for c in g.components()) == [2, 3]
    assert g.complement().edge_count == 10 - 4
    assert g.induced([0, 1]).edge_count == 1

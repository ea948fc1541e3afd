import itertools
from fractions import Fraction

import numpy as np
import pytest

from homdensity.drc import (DrcError, DrcParams, Hypergraph, SeqHypergraph, constructive_bound,
                            drc_classify, drc_verify, hyper_embed_batch, hyper_embed_count,
                            reference_constant, root_ceil, root_floor, surj)
from homdensity.corpus import all_graphs
from homdensity.generators import complete, cycle, gnp, rng, two_cliques
from homdensity.graph import build_graph, common_neighborhood
from homdensity.homcount import hom_count


def test_params_validation():
    assert DrcParams(1, 1, 3).c == Fraction(1, 6**6)
    assert list(DrcParams(1, 2, 4).k_range) == [2, 3, 4]
    with pytest.raises(DrcError):
        DrcParams(1, 4, 3)
    with pytest.raises(DrcError):
        DrcParams(1, 1, 3, c=Fraction(3, 2))
    with pytest.raises(DrcError):
        DrcParams(0, 1, 3)


def test_integer_roots():
    for e in (1, 2, 3, 4):
        for num in range(0, 200):
            x = Fraction(num, 7)
            lo, hi = root_floor(x, e), root_ceil(x, e)
            assert lo**e <= x < (lo + 1) ** e
            assert (hi - 1) ** e < x <= hi**e or (hi == 0 and x == 0)


def test_surjections():
    assert [surj(3, j) for j in range(4)] == [0, 1, 6, 6]
    assert surj(4, 2) == 14


def test_complete_graph_no_rare():
    g = complete(10)
    rep = drc_classify(g, DrcParams(1, 1, 3))
    assert all(v == 0 for v in rep.rare_counts.values())
    assert rep.good_count == 10 and rep.good_sum == hom_count(build_graph(2, [(0, 1)]), g)


def test_two_cliques_cross_pairs_rare():
    g = two_cliques(10)
    rep = drc_classify(g, DrcParams(1, 2, 4))
    assert common_neighborhood(g, (0, 9)) == frozenset()
    # the 2*5*5 ordered cross pairs are the only rare 2-sequences
    assert rep.rare_counts[2] == 50


def test_edgeless_rejected():
    with pytest.raises(DrcError):
        drc_classify(build_graph(4, []), DrcParams(1, 1, 3))


def test_rare_boundary_is_inclusive():
    # c = 1 on K5 with r = d = 1: the cutoff for k = 1 is exactly N - 1 = degree
    rep = drc_classify(complete(5), DrcParams(1, 1, 1, c=1))
    assert rep.thresholds.rare_max[1] == 4
    assert rep.rare_counts[1] == 5


@pytest.mark.parametrize("g,params", [
    (complete(5), DrcParams(1, 1, 3)),
    (gnp(20, "1/2", 7), DrcParams(1, 2, 4)),
    (two_cliques(12), DrcParams(2, 2, 4)),
])
def test_verify_examples(g, params):
    v = drc_verify(g, params)
    assert v.holds and v.exhaustive
    assert 2 * v.good_sum >= v.h_krd


def test_x_k_two_routes_and_totals():
    for seed in range(3):
        g = gnp(16, "1/2", seed)
        for c in (Fraction(1, 4), Fraction(1, 16)):
            rep = drc_classify(g, DrcParams(2, 2, 4, c=c))
            assert rep.x_k == rep.x_k_by_t
            assert rep.classified_total == g.n**2
            assert rep.good_sum <= rep.h_krd


def test_monotone_in_c():
    g = two_cliques(12)
    prev_rare, prev_good = None, None
    for c in (Fraction(1), Fraction(1, 2), Fraction(1, 4), Fraction(1, 16), reference_constant(4)):
        rep = drc_classify(g, DrcParams(1, 2, 4, c=c))
        total_rare = sum(rep.rare_counts.values())
        if prev_rare is not None:
            assert total_rare <= prev_rare and rep.good_sum >= prev_good
        prev_rare, prev_good = total_rare, rep.good_sum


def test_relaxed_constant_below_reference_holds():
    c = reference_constant(3) / 7
    for g in all_graphs(6)[::17]:
        if g.edge_count:
            assert drc_verify(g, DrcParams(1, 1, 3, c=c)).holds


def test_sampling_is_labelled():
    g = gnp(30, "1/2", 1)
    rep = drc_classify(g, DrcParams(1, 2, 3), samples=50, seed=4)
    assert not rep.exhaustive and rep.samples == 50 and rep.rng_algorithm
    again = drc_classify(g, DrcParams(1, 2, 3), samples=50, seed=4)
    assert again.good_sum == rep.good_sum


def test_budget_rejection():
    with pytest.raises(DrcError, match="budget"):
        drc_classify(gnp(40, "1/2", 1), DrcParams(1, 2, 5), budget=1000)


# -- hypergraph embeddings ----------------------------------------------------


def test_embed_examples():
    r = hyper_embed_count(Hypergraph(2, ()), SeqHypergraph.from_sequences(3, [], [1]))
    assert r.count == 9 and r.half_bound_holds
    gd = SeqHypergraph.from_predicate(3, lambda s: s[0] != s[1], [2])
    r = hyper_embed_count(Hypergraph(2, [(0, 1)]), gd)
    assert r.non_edges[2] == 3 and r.hypothesis[2]
    assert r.count == 6 and 2 * r.count >= 9
    for N in (1, 2, 4):
        full = SeqHypergraph.from_predicate(N, lambda s: True, [2])
        assert hyper_embed_count(Hypergraph(2, [(0, 1)]), full).count == N * N


def test_embed_against_naive():
    gen = rng(11)
    for _ in range(30):
        h = int(gen.integers(1, 4))
        subsets = [s for r in range(1, h + 1) for s in itertools.combinations(range(h), r)]
        pick = gen.choice(len(subsets), size=min(len(subsets), int(gen.integers(1, 4))),
                          replace=False)
        hg = Hypergraph(h, [subsets[i] for i in pick])
        N = int(gen.integers(1, 4))
        tables = {k: gen.integers(0, 2, size=(N,) * k) for k in range(1, h + 1)}
        gd = SeqHypergraph(N, tables)
        naive = sum(all(tables[len(e)][tuple(f[v] for v in e)] for e in hg.edges)
                    for f in itertools.product(range(N), repeat=h))
        assert hyper_embed_count(hg, gd).count == naive


def _shapes(max_h=3, max_e=3):
    for h in range(1, max_h + 1):
        subsets = [s for r in range(1, h + 1) for s in itertools.combinations(range(h), r)]
        for e in range(max_e + 1):
            for edges in itertools.combinations(subsets, e):
                yield Hypergraph(h, edges)


def test_half_bound_exhaustive_tiny():
    # every predicate on sequences of length <= 2 over N = 2
    seqs = {k: list(itertools.product(range(2), repeat=k)) for k in (1, 2)}
    for hg in _shapes(2, 3):
        if not hg.edges:
            continue
        ks = range(min(hg.edge_sizes), 3)
        cells = [(k, s) for k in ks for s in seqs[k]]
        for mask in range(1 << len(cells)):
            tables = {k: np.zeros((2,) * k, dtype=np.int64) for k in ks}
            for i, (k, s) in enumerate(cells):
                tables[k][s] = mask >> i & 1
            r = hyper_embed_count(hg, SeqHypergraph(2, tables))
            assert not r.hypothesis_holds or r.half_bound_holds


def test_half_bound_sampled_n4_and_batch_agrees():
    gen = rng(44)
    for hg in _shapes():
        N, P = 4, 300
        e = len(hg.edges)
        dmin = min(hg.edge_sizes) if e else 1
        rate = gen.random(P) / max(e, 1)
        tables = {k: (gen.random((P,) + (N,) * k) >= rate.reshape((P,) + (1,) * k))
                  .astype(np.int64) for k in range(dmin, hg.h + 1)}
        batch = hyper_embed_batch(hg, N, tables)
        assert not np.any(batch.hypothesis & ~batch.half_bound)
        for i in range(0, P, 60):
            r = hyper_embed_count(hg, SeqHypergraph(N, {k: t[i] for k, t in tables.items()}))
            assert (r.count, r.hypothesis_holds) == (int(batch.counts[i]),
                                                     bool(batch.hypothesis[i]))


# -- constructive bound --------------------------------------------------------


def test_constructive_c4_k4():
    cb = constructive_bound(cycle(4), complete(4))
    assert cb.exact_count == 84 and cb.certificate and cb.lower_bound <= 84


def test_constructive_relaxed_on_complete():
    for n in (3, 4, 5, 6):
        for h in (cycle(4), build_graph(3, [(0, 1), (0, 2)], partition="auto")):
            cb = constructive_bound(h, complete(n), c=Fraction(1))
            assert cb.certificate and cb.lower_bound <= cb.exact_count


def test_constructive_gnp30():
    g = gnp(30, "1/2", 3)
    cb = constructive_bound(cycle(4), g, c=Fraction(1, 4))
    assert 0 < cb.lower_bound <= cb.exact_count
    assert cb.exact_count == hom_count(cycle(4), g)
    assert cb.embed_violations == 0 and cb.derived_bound_holds


def test_constructive_rejects_without_complete_vertex():
    with pytest.raises(DrcError, match="complete"):
        constructive_bound(cycle(6), complete(4))

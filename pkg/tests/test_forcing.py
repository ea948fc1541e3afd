from fractions import Fraction

import pytest

from homdensity.corpus import all_graphs
from homdensity.forcing import (codegree_deviation, degree_concentration, forcing_experiment,
                                leaf_extension, quasirandom_battery)
from homdensity.generators import GenSpec, complete, cycle, gnp, parse_pattern, path, two_cliques
from homdensity.graph import GraphError, build_graph
from homdensity.homcount import hom_count


def test_complete_graph_battery():
    n = 50
    rep = quasirandom_battery(complete(n))
    assert rep.p_ref == Fraction(n - 1, n)
    assert rep.t_c4 == Fraction((n - 1) ** 4 + (n - 1), n**4)
    assert rep.dev_c4 < Fraction(1, 100) and rep.passed


def test_two_cliques_battery_fails():
    rep = quasirandom_battery(two_cliques(200))
    assert abs(rep.dev_c4 - 1) < Fraction(1, 20)
    assert not rep.pass_c4 and not rep.passed
    assert rep.pass_edge


def test_battery_rejections():
    with pytest.raises(GraphError):
        quasirandom_battery(build_graph(4, []))
    with pytest.raises(GraphError):
        quasirandom_battery(build_graph(1, []))


def test_battery_deviations_nonnegative_and_thresholded():
    for g in all_graphs(6)[::37]:
        if not g.edge_count:
            continue
        rep = quasirandom_battery(g, tol_edge="1/10", tol_c4="1/10")
        assert min(rep.dev_edge, rep.dev_c4, rep.dev_codeg) >= 0
        assert rep.pass_c4 == (rep.dev_c4 <= Fraction(1, 10))


def test_gnp_battery_seed_stable():
    a = quasirandom_battery(gnp(300, "1/5", 2))
    b = quasirandom_battery(gnp(300, "1/5", 2))
    assert a == b


def test_gnp_2000_battery():
    # edge and C4 homomorphism densities on the stated instance; the C4 figure
    # is dominated by degenerate closed walks (about 2/(p^2 N)) at this size
    rep = quasirandom_battery(gnp(2000, "1/10", 11))
    assert rep.pass_edge
    assert rep.dev_c4_copies is not None and rep.dev_c4_copies <= Fraction(1, 100)
    assert abs(rep.dev_c4 - 2 / (rep.p_ref**2 * 2000)) < Fraction(2, 100)


def test_paley_battery():
    from homdensity.generators import paley
    rep = quasirandom_battery(paley(1009), p="1/2")
    assert rep.dev_c4 <= Fraction(1, 20)


def test_codegree_zero_implies_integral():
    for g in all_graphs(6)[::7]:
        if not g.edge_count:
            continue
        for p in (Fraction(1, 2), Fraction(1, 3), Fraction(2, 3), Fraction(1)):
            if codegree_deviation(g, p) == 0:
                assert (p * p * g.n).denominator == 1
    # the diagonal (codeg(u, u) = deg u) keeps K_N away from zero
    assert codegree_deviation(complete(4), Fraction(1)) > 0


def test_forest_obstacle_family():
    fam = [GenSpec("two_cliques", {"n": n}, 0) for n in (100, 200, 400)]
    exp = forcing_experiment(path(2), fam)
    assert exp.premise_all and not exp.conclusion_all and exp.refutes_at_tolerance
    assert "not forcing" in exp.verdict


def test_c4_on_two_cliques_premise_fails():
    fam = [GenSpec("two_cliques", {"n": n}, 0) for n in (100, 200)]
    exp = forcing_experiment(cycle(4), fam)
    assert not any(m.premise for m in exp.members)
    assert exp.verdict.startswith("premise fails") and "consistent" in exp.verdict


def test_c4_on_gnp_family():
    fam = [GenSpec("gnp", {"n": n, "p": "1/2"}, 5) for n in (500, 1000, 2000)]
    exp = forcing_experiment(cycle(4), fam)
    assert exp.premise_all and exp.conclusion_all
    assert exp.verdict == "consistent with forcing"


def test_forcing_empty_family():
    with pytest.raises(ValueError):
        forcing_experiment(cycle(4), [])


def test_degree_concentration_examples():
    d = degree_concentration(two_cliques(100), "1/2", "1/100")
    assert d.deviant_count == 100 and d.identity_holds
    n = 30
    d = degree_concentration(complete(n), Fraction(n - 1, n), "1/3")
    assert d.deviant_count == 0 and d.sum_delta == 0 and d.identity_holds
    with pytest.raises(ValueError):
        degree_concentration(complete(3), "1/2", 1)


def test_degree_identity_many():
    for seed in range(10):
        g = gnp(40, "2/5", seed)
        for p in ("1/7", "1/2", "9/10"):
            d = degree_concentration(g, p, "1/10")
            assert d.identity_holds
            assert d.h_k12 == hom_count(path(2), g)


def test_leaf_extension_examples():
    h = build_graph(5, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 4)], partition="auto")
    for g in all_graphs(6)[::19]:
        rec = leaf_extension(h, g)
        assert rec.applicable and rec.holds and rec.extension_sum == rec.h_h
    # P1 has no core vertex, so the relation does not apply
    rec = leaf_extension(parse_pattern("K2"), complete(4))
    assert not rec.applicable


def test_leaf_extension_stars_and_paths():
    g = gnp(25, "1/3", 8)
    for h in (parse_pattern("S_3"), path(3), path(4)):
        rec = leaf_extension(h, g)
        if rec.applicable:
            assert rec.extension_sum == rec.h_h and rec.weak_bound <= rec.h_h

import math

import numpy as np
import pytest
from hypothesis import given, settings

from cliqueprune.decomposition import Coloring, greedy_coloring
from cliqueprune.features import (EDGE_FEATURES, VERTEX_FEATURES, FeatureMatrix,
                                  ImproperColoringError, chi_square_scores,
                                  edge_chromatic_rule, edge_features, eigencentrality,
                                  lcc_all, local_chromatic_density, vertex_chromatic_rule,
                                  vertex_features)
from cliqueprune.generators import complete_graph, cycle_graph, dimacs_keller, star_graph
from cliqueprune.graph import Graph, remove_edges
from cliqueprune.solver import brute_force_enumerate

from .conftest import A, B, C, X, graphs


def bridging_vertex_graph():
    """v (id 0) touches one vertex of each of two triangles."""
    g = Graph.from_edges(7, [(1, 2), (1, 3), (2, 3), (4, 5), (4, 6), (5, 6), (0, 1), (0, 4)])
    # white = 1; both triangles use the non-white colors in the same places
    coloring = Coloring((1, 2, 3, 1, 2, 3, 1), 3)
    return g, coloring


def test_lcc():
    assert lcc_all(complete_graph(3)).tolist() == [1.0, 1.0, 1.0]
    assert lcc_all(star_graph(3))[0] == 0.0


def test_lcc_two_triangles(tt):
    lcc = lcc_all(tt)
    assert lcc[A] == pytest.approx(1 / 3)
    assert lcc[B] == 1.0


def test_eigencentrality_complete():
    x = eigencentrality(complete_graph(6))
    assert np.allclose(x, 1 / math.sqrt(6), atol=1e-12)


def test_eigencentrality_star_against_dense_eigh():
    g = star_graph(4)
    vals, vecs = np.linalg.eigh(g.adjacency_matrix().toarray())
    ref = np.abs(vecs[:, np.argmax(vals)])
    assert ref[0] / ref[1] == pytest.approx(2.0)
    x = eigencentrality(g)
    assert x[0] / x[1] == pytest.approx(2.0, rel=1e-9)
    assert np.allclose(x, ref, atol=1e-9)


def test_eigencentrality_cycle():
    x = eigencentrality(cycle_graph(4))
    assert np.allclose(x, x[0], atol=1e-12)


def test_eigencentrality_edgeless():
    with pytest.raises(ValueError):
        eigencentrality(Graph.from_edges(3, []))


def test_chi_square_regular():
    own, nbr = chi_square_scores(cycle_graph(7), "degree")
    assert own.tolist() == [0.0] * 7
    assert nbr.tolist() == [0.0] * 7


def test_chi_square_star():
    own, nbr = chi_square_scores(star_graph(3), "degree")
    # mean degree 1.5
    assert own[0] == pytest.approx(1.5)
    assert own[1:] == pytest.approx([1 / 6] * 3)
    assert nbr[0] == pytest.approx(1 / 6)
    assert nbr[1] == pytest.approx(1.5)


def test_chi_square_triangle_lcc():
    own, _ = chi_square_scores(complete_graph(3), "lcc")
    assert own.tolist() == [0.0] * 3


def test_chi_square_zero_mean():
    own, nbr = chi_square_scores(star_graph(3), "lcc")
    assert own.tolist() == [0.0] * 4 and nbr.tolist() == [0.0] * 4


def test_chromatic_density_complete():
    g = complete_graph(5)
    assert local_chromatic_density(g, greedy_coloring(g)) == pytest.approx([0.8] * 5)


def test_chromatic_density_bridging_vertex_graph():
    g, coloring = bridging_vertex_graph()
    assert local_chromatic_density(g, coloring)[0] == 1 / 3


def test_chromatic_density_isolated():
    g = Graph.from_edges(3, [(0, 1)])
    assert local_chromatic_density(g, greedy_coloring(g))[2] == 0.0


def test_improper_coloring_rejected():
    with pytest.raises(ImproperColoringError):
        local_chromatic_density(complete_graph(3), Coloring((1, 1, 2), 2))


def test_vertex_features_k4():
    fm = vertex_features(complete_graph(4))
    assert fm.names == VERTEX_FEATURES
    expected = [4, 6, 3, 1.0, 0.5, 0, 0, 0, 0, 0.75]
    for row in fm.rows:
        assert row == pytest.approx(expected, abs=1e-12)


def test_vertex_features_isomorphic_vertices(tt):
    fm = vertex_features(tt)
    # b and c are swapped by an automorphism that fixes everything else
    assert np.array_equal(fm.rows[B, :5], fm.rows[C, :5])
    assert fm.rows[B, 5:9] == pytest.approx(fm.rows[C, 5:9])


def test_vertex_features_keller4():
    fm = vertex_features(dimacs_keller(4))
    assert fm.rows.shape == (171, 10)
    assert np.all(np.isfinite(fm.rows))


def test_vertex_features_edgeless():
    fm = vertex_features(Graph.from_edges(3, []))
    assert fm.column("eigencentrality").tolist() == [0.0] * 3


def test_edge_features_triangle():
    fm = edge_features(complete_graph(3))
    assert fm.names == EDGE_FEATURES
    assert fm.keys == ((0, 1), (0, 2), (1, 2))
    row = dict(zip(fm.names, fm.rows[0]))
    assert row["jaccard"] == pytest.approx(1 / 3)
    assert row["dice"] == 0.5
    assert row["cosine"] == 0.5
    assert row["common_neighbors"] == 1
    assert row["inverse_log_weighted"] == pytest.approx(1 / math.log(2))
    assert row["mean_degree"] == 2
    assert row["edge_chromatic_density"] == pytest.approx(1 / 3)


def test_edge_features_complete_paths():
    fm = edge_features(complete_graph(6))
    assert fm.column("common_neighbors").tolist() == [4.0] * 15


def test_edge_features_bridge(tt):
    fm = edge_features(tt)
    i = fm.keys.index((A, X))
    assert fm.column("common_neighbors")[i] == 0
    assert fm.column("edge_chromatic_density")[i] == 0


def test_edge_rule_bridge_example(tt):
    c = greedy_coloring(tt)
    assert edge_chromatic_rule(tt, c, 3) == [(A, X)]
    # the vertex rule cannot remove a or x
    assert vertex_chromatic_rule(tt, c, 3) == []
    pruned = remove_edges(tt, [(A, X)])
    before, after = brute_force_enumerate(tt), brute_force_enumerate(pruned)
    assert (after.omega, after.cliques) == (before.omega, before.cliques)


def test_edge_rule_k4():
    g = complete_graph(4)
    assert edge_chromatic_rule(g, greedy_coloring(g), 4) == []


@settings(max_examples=30, deadline=None)
@given(graphs(max_n=10))
def test_edge_rule_k2_never_fires(g):
    assert edge_chromatic_rule(g, greedy_coloring(g), 2) == []


@settings(max_examples=150, deadline=None)
@given(graphs(max_n=12))
def test_chromatic_rules_are_safe(g):
    truth = brute_force_enumerate(g)
    c = greedy_coloring(g)
    k = truth.omega
    if k >= 2:
        pruned = remove_edges(g, edge_chromatic_rule(g, c, k))
        after = brute_force_enumerate(pruned)
        assert (after.omega, after.cliques) == (truth.omega, truth.cliques)
    assert not set(vertex_chromatic_rule(g, c, k)) & truth.covered


def check_feature_bounds(g: Graph, tol=1e-10):
    fm = vertex_features(g)
    for name in ("lcc", "chromatic_density"):
        col = fm.column(name)
        assert np.all((col >= 0) & (col <= 1)), name
    eig = fm.column("eigencentrality")
    assert np.all(eig >= 0)
    if g.m:
        assert np.linalg.norm(eig) == pytest.approx(1.0, abs=1e-12)
        a = g.adjacency_matrix()
        x = eigencentrality(g, tol=tol)
        lam = float(x @ (a @ x))
        assert np.linalg.norm(a @ x - lam * x) <= 10 * tol * lam
    ef = edge_features(g)
    for name in ("jaccard", "dice", "cosine", "edge_chromatic_density"):
        col = ef.column(name)
        assert np.all((col >= 0) & (col <= 1)), name
    e8 = ef.column("common_neighbors")
    assert np.all(e8 >= 0) and np.all(e8 == np.round(e8))


@settings(max_examples=80, deadline=None)
@given(graphs(max_n=14))
def test_feature_invariants(g):
    check_feature_bounds(g)


def test_deterministic_rows():
    g = dimacs_keller(4)
    a, b = vertex_features(g), vertex_features(g)
    assert np.array_equal(a.rows, b.rows)


def test_relabelling_keeps_rows(tt):
    # same structure, different external labels: identical feature rows
    h = Graph(tt.adjacency, tuple(100 + i for i in range(tt.n)))
    assert np.array_equal(vertex_features(tt).rows, vertex_features(h).rows)


def test_csv_round_trip(tmp_path, tt):
    for fm in (vertex_features(tt), edge_features(tt)):
        p = tmp_path / f"{fm.subject}.csv"
        fm.to_csv(p)
        back = FeatureMatrix.from_csv(p)
        assert back.names == fm.names and back.keys == fm.keys
        assert np.array_equal(back.rows, fm.rows)


def test_csv_header(tmp_path):
    p = tmp_path / "e.csv"
    edge_features(complete_graph(3)).to_csv(p)
    lines = p.read_text().splitlines()
    assert lines[0].split(",")[:3] == ["u", "v", "jaccard"]
    assert len(lines) == 4

import math

import pytest
from hypothesis import given, settings

from cliqueprune.generators import complete_graph, dimacs_keller, path_graph
from cliqueprune.graph import (EmptyGraphError, Graph, GraphFormatError, edge_density,
                               induced_subgraph, load_graph, read_graph, remove_edges,
                               write_graph)

from .conftest import A, B, C, X, graphs


def check_invariants(g: Graph):
    for v, nb in enumerate(g.adjacency):
        assert list(nb) == sorted(set(nb))
        assert v not in nb
        for u in nb:
            assert 0 <= u < g.n
            assert v in g.adjacency[u]
    assert g.m == sum(len(a) for a in g.adjacency) // 2


def write(tmp_path, text, name="g.txt"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_load_triangle(tmp_path):
    g = load_graph(write(tmp_path, "1 2\n2 3\n1 3"))
    assert (g.n, g.m) == (3, 3)
    assert g.labels == (1, 2, 3)
    check_invariants(g)


def test_load_cleans_duplicates_and_loops(tmp_path):
    g, stats = read_graph(write(tmp_path, "1 2\n2 1\n1 1"))
    assert (g.n, g.m) == (2, 1)
    assert stats.self_loops == 1
    assert stats.duplicates == 1


def test_load_symmetrizes_directed_input(tmp_path):
    g, stats = read_graph(write(tmp_path, "5 7\n7 9\n"))
    assert g.labels == (5, 7, 9)
    assert g.has_edge(0, 1) and g.has_edge(1, 0)
    assert stats.directed_only == 2


def test_comments_and_sparse_ids(tmp_path):
    g = load_graph(write(tmp_path, "% header\n# another\n100 3\n\n3 42\n"))
    assert g.labels == (3, 42, 100)
    assert g.m == 2


def test_malformed_line_reports_line_number(tmp_path):
    with pytest.raises(GraphFormatError) as err:
        load_graph(write(tmp_path, "1 2\n3\n"))
    assert err.value.line == 2
    with pytest.raises(GraphFormatError) as err:
        load_graph(write(tmp_path, "1 2\n2 x\n"))
    assert err.value.line == 2
    with pytest.raises(GraphFormatError):
        load_graph(write(tmp_path, "1 -2\n"))


def test_empty_graph_is_an_error(tmp_path):
    with pytest.raises(EmptyGraphError):
        load_graph(write(tmp_path, "% nothing here\n"))


def test_matrix_market(tmp_path):
    text = ("%%MatrixMarket matrix coordinate pattern symmetric\n"
            "% comment\n"
            "5 5 3\n2 1\n3 1\n3 2\n")
    g = load_graph(write(tmp_path, text, "g.mtx"))
    # vertices 4 and 5 are isolated but declared by the header
    assert (g.n, g.m) == (5, 3)
    assert g.labels == (1, 2, 3, 4, 5)
    assert g.degrees.tolist() == [2, 2, 2, 0, 0]


def test_matrix_market_values_ignored(tmp_path):
    text = ("%%MatrixMarket matrix coordinate real general\n"
            "3 3 4\n1 2 0.5\n2 1 0.5\n2 3 7\n3 3 1.0\n")
    g = load_graph(write(tmp_path, text, "g.mtx"), "matrix-market")
    assert (g.n, g.m) == (3, 2)


def test_matrix_market_bad_index(tmp_path):
    text = "%%MatrixMarket matrix coordinate pattern symmetric\n3 3 1\n4 1\n"
    with pytest.raises(GraphFormatError) as err:
        load_graph(write(tmp_path, text, "g.mtx"))
    assert err.value.line == 3


def test_dimacs(tmp_path):
    text = "c keller-ish\np edge 4 2\ne 1 2\ne 3 4\n"
    g = load_graph(write(tmp_path, text, "g.clq"))
    assert (g.n, g.m) == (4, 2)


def test_write_triangle(tmp_path):
    g = Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)])
    p = tmp_path / "out.txt"
    write_graph(g, p)
    assert p.read_text().splitlines() == ["0 1", "0 2", "1 2"]


def test_write_uses_external_labels(tmp_path):
    g = Graph.from_edges(3, [(0, 1), (1, 2)], labels=[10, 20, 30])
    p = tmp_path / "out.txt"
    write_graph(g, p)
    assert p.read_text().splitlines() == ["10 20", "20 30"]


def test_write_keeps_isolated_vertices(tmp_path):
    g = Graph.from_edges(4, [(0, 1)], labels=[1, 2, 3, 4])
    p = tmp_path / "out.txt"
    write_graph(g, p)
    h = load_graph(p)
    assert h == g


@settings(max_examples=50, deadline=None)
@given(graphs(max_n=15))
def test_round_trip(tmp_path_factory, g):
    p = tmp_path_factory.mktemp("rt") / "g.txt"
    write_graph(g, p)
    h = load_graph(p)
    assert (h.n, h.m) == (g.n, g.m)
    assert sorted(h.degrees.tolist()) == sorted(g.degrees.tolist())
    assert h.adjacency == g.adjacency
    check_invariants(h)


def test_induced_subgraph_k4():
    k4 = complete_graph(4)
    h = induced_subgraph(k4, {0, 2, 3})
    assert h == Graph.from_edges(3, [(0, 1), (0, 2), (1, 2)], labels=[0, 2, 3])


def test_induced_identity():
    g = path_graph(5)
    assert induced_subgraph(g, range(5)) == g


def test_induced_two_triangles(tt):
    h = induced_subgraph(tt, {A, B, C, X})
    assert h.m == 4
    got = {(h.labels[u], h.labels[v]) for u, v in h.edges()}
    assert got == {(A, B), (A, C), (B, C), (A, X)}


def test_induced_out_of_range():
    with pytest.raises(IndexError):
        induced_subgraph(path_graph(3), {0, 3})


@settings(max_examples=60, deadline=None)
@given(graphs(max_n=12))
def test_induced_properties(g):
    s = set(range(0, g.n, 2)) | {g.n - 1}
    t = set(sorted(s)[: len(s) // 2 + 1])
    gs = induced_subgraph(g, s)
    check_invariants(gs)
    # monotone: every kept edge is an edge of g
    for u, v in gs.edges():
        assert g.has_edge(gs.labels[u], gs.labels[v])
    # composition: restricting twice equals restricting once
    t_in_s = [i for i, lab in enumerate(gs.labels) if lab in t]
    assert induced_subgraph(gs, t_in_s) == induced_subgraph(g, t)


def test_remove_edges(tt):
    h = remove_edges(tt, [(X, A)])
    assert h.m == tt.m - 1 and not h.has_edge(A, X)


def test_edge_density():
    assert edge_density(complete_graph(5)) == 1.0
    assert edge_density(path_graph(3)) == pytest.approx(2 / 3)
    with pytest.raises(ValueError):
        edge_density(Graph.from_edges(1, []))


def test_keller4_size_and_density(tmp_path):
    g = dimacs_keller(4)
    p = tmp_path / "keller4.txt"
    write_graph(g, p)
    h = load_graph(p)
    assert (h.n, h.m) == (171, 9435)
    assert math.isclose(edge_density(h), 9435 / (171 * 170 / 2))
    assert round(edge_density(h), 3) == 0.649
    check_invariants(h)

import itertools

import pytest
from hypothesis import strategies as st

from cliqueprune.graph import Graph

# two triangles {a,b,c} and {x,y,z} joined by the edge {a,x}
A, B, C, X, Y, Z = range(6)


def two_triangles() -> Graph:
    return Graph.from_edges(6, [(A, B), (A, C), (B, C), (X, Y), (X, Z), (Y, Z), (A, X)])


def triangle_pendant() -> Graph:
    return Graph.from_edges(4, [(0, 1), (0, 2), (1, 2), (2, 3)])


def naive_max_cliques(g: Graph):
    """Every subset, largest first. Only for tiny graphs."""
    for k in range(g.n, 0, -1):
        found = [c for c in itertools.combinations(range(g.n), k)
                 if all(g.has_edge(u, v) for u, v in itertools.combinations(c, 2))]
        if found:
            return k, sorted(found)
    return 0, []


@st.composite
def graphs(draw, min_n=1, max_n=12):
    n = draw(st.integers(min_n, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    p = draw(st.sampled_from([0.2, 0.5, 0.8]))
    mask = draw(st.lists(st.floats(0, 1), min_size=len(pairs), max_size=len(pairs)))
    return Graph.from_edges(n, [e for e, r in zip(pairs, mask) if r < p])


@pytest.fixture
def tt():
    return two_triangles()


@pytest.fixture
def tp():
    return triangle_pendant()

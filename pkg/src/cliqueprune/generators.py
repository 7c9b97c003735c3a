"""Deterministic graph generators: G(n, p), Chung-Lu, planted cliques, Keller."""

from __future__ import annotations

from itertools import product

import numpy as np

from .graph import Graph


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, ((u, v) for u in range(n) for v in range(u + 1, n)))


def cycle_graph(n: int) -> Graph:
    return Graph.from_edges(n, ((i, (i + 1) % n) for i in range(n)))


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, ((i, i + 1) for i in range(n - 1)))


def star_graph(leaves: int) -> Graph:
    return Graph.from_edges(leaves + 1, ((0, i) for i in range(1, leaves + 1)))


def gnp(n: int, p: float, seed=None) -> Graph:
    rng = _rng(seed)
    iu, ju = np.triu_indices(n, 1)
    hit = rng.random(len(iu)) < p
    return Graph.from_edges(n, zip(iu[hit].tolist(), ju[hit].tolist()))


def chung_lu(n: int, avg_degree: float, exponent: float = 2.5, seed=None) -> Graph:
    """Random graph with power-law expected degrees (exponent > 2)."""
    rng = _rng(seed)
    i0 = 1.0
    w = (np.arange(n) + i0) ** (-1.0 / (exponent - 1.0))
    w *= avg_degree * n / w.sum()
    total = w.sum()
    iu, ju = np.triu_indices(n, 1)
    prob = np.minimum(1.0, w[iu] * w[ju] / total)
    hit = rng.random(len(iu)) < prob
    return Graph.from_edges(n, zip(iu[hit].tolist(), ju[hit].tolist()))


def plant_clique(g: Graph, size: int, seed=None) -> tuple[Graph, tuple[int, ...]]:
    """Add all edges among ``size`` uniformly chosen vertices."""
    if size > g.n:
        raise ValueError(f"cannot plant a {size}-clique in {g.n} vertices")
    rng = _rng(seed)
    members = tuple(sorted(rng.choice(g.n, size=size, replace=False).tolist()))
    extra = [(u, v) for i, u in enumerate(members) for v in members[i + 1:]]
    return Graph.from_edges(g.n, g.edges() + extra, g.labels), members


def keller_graph(dim: int) -> Graph:
    """Keller graph on Z_4^dim.

    Two words are adjacent when they differ in at least two coordinates and
    in at least one of those by exactly 2 (mod 4).
    """
    words = list(product(range(4), repeat=dim))
    arr = np.array(words, dtype=np.int8)
    edges = []
    for i in range(len(words)):
        diff = (arr[i + 1:] - arr[i]) % 4
        ok = ((diff != 0).sum(axis=1) >= 2) & ((diff == 2).any(axis=1))
        edges.extend((i, i + 1 + j) for j in np.flatnonzero(ok).tolist())
    return Graph.from_edges(len(words), edges, labels=range(1, len(words) + 1))


def dimacs_keller(dim: int) -> Graph:
    """The DIMACS benchmark ``keller<dim>``: the neighbourhood of one vertex of
    the Keller graph (keller4 has 171 vertices, keller5 776)."""
    from .graph import induced_subgraph

    full = keller_graph(dim)
    sub = induced_subgraph(full, full.adjacency[0])
    return Graph(sub.adjacency, tuple(range(1, sub.n + 1)))

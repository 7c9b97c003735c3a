"""k-core decomposition, the ω-oracle baseline, and greedy coloring."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .graph import Graph, VertexSet


@dataclass(frozen=True)
class CoreDecomposition:
    core: tuple[int, ...]
    max_core: int
    order: tuple[int, ...]  # peeling order


@dataclass(frozen=True)
class Coloring:
    color: tuple[int, ...]  # colors are 1..k
    k: int


def core_numbers(g: Graph) -> CoreDecomposition:
    """Bucket peeling (Batagelj and Zaversnik), O(n + m)."""
    n = g.n
    if n == 0:
        return CoreDecomposition((), 0, ())
    deg = [len(a) for a in g.adjacency]
    maxd = max(deg)
    bins = [0] * (maxd + 1)
    for d in deg:
        bins[d] += 1
    start = 0
    for d in range(maxd + 1):
        bins[d], start = start, start + bins[d]
    vert = [0] * n
    pos = [0] * n
    for v in range(n):
        pos[v] = bins[deg[v]]
        vert[pos[v]] = v
        bins[deg[v]] += 1
    for d in range(maxd, 0, -1):
        bins[d] = bins[d - 1]
    bins[0] = 0

    for i in range(n):
        v = vert[i]
        for u in g.adjacency[v]:
            if deg[u] > deg[v]:
                du = deg[u]
                pu = pos[u]
                pw = bins[du]
                w = vert[pw]
                if u != w:
                    vert[pu], vert[pw] = w, u
                    pos[u], pos[w] = pw, pu
                bins[du] += 1
                deg[u] -= 1
    return CoreDecomposition(tuple(deg), max(deg), tuple(vert))


def omega_oracle_prune(g: Graph, k: int) -> VertexSet:
    """Survivors of deleting every vertex with core number below ``k - 1``."""
    if k < 1:
        raise ValueError(f"clique size estimate must be >= 1, got {k}")
    core = core_numbers(g).core
    return frozenset(v for v in range(g.n) if core[v] >= k - 1)


def greedy_coloring(g: Graph) -> Coloring:
    """First-fit coloring in descending degree order, ties by ascending id."""
    n = g.n
    order = sorted(range(n), key=lambda v: (-len(g.adjacency[v]), v))
    color = [0] * n
    k = 0
    for v in order:
        used = {color[u] for u in g.adjacency[v]}
        c = 1
        while c in used:
            c += 1
        color[v] = c
        if c > k:
            k = c
    return Coloring(tuple(color), k)


def is_proper(g: Graph, coloring: Coloring) -> bool:
    c = coloring.color
    if len(c) != g.n:
        return False
    return all(c[u] != c[v] for u, v in g.edges())


def write_values(g: Graph, values: Sequence, path: str | Path) -> None:
    """Two-column ``label value`` text, one vertex per line."""
    with open(path, "w") as fh:
        for lab, val in zip(g.labels, values):
            fh.write(f"{lab} {val}\n")

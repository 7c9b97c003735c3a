"""Undirected simple graphs in compact adjacency form, plus file I/O."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

log = logging.getLogger(__name__)

VertexSet = frozenset  # members are internal vertex ids


class GraphFormatError(ValueError):
    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


class EmptyGraphError(ValueError):
    pass


@dataclass(frozen=True)
class LoadStats:
    lines: int = 0
    self_loops: int = 0
    duplicates: int = 0
    directed_only: int = 0


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable undirected simple graph on vertices ``0..n-1``.

    ``labels[i]`` is the external identifier of internal vertex ``i``;
    it is what gets written back to disk.
    """

    adjacency: tuple[tuple[int, ...], ...]
    labels: tuple[int, ...]
    m: int = field(init=False)

    def __post_init__(self):
        if len(self.labels) != len(self.adjacency):
            raise ValueError("labels and adjacency differ in length")
        object.__setattr__(self, "m", sum(len(a) for a in self.adjacency) // 2)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]],
                   labels: Sequence[int] | None = None) -> "Graph":
        """Build a graph from internal-id edges; loops and repeats are dropped."""
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            if u != v:
                nbrs[u].add(v)
                nbrs[v].add(u)
        if labels is None:
            labels = range(n)
        return cls(tuple(tuple(sorted(s)) for s in nbrs), tuple(int(x) for x in labels))

    @property
    def n(self) -> int:
        return len(self.adjacency)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.fromiter((len(a) for a in self.adjacency), dtype=np.int64, count=self.n)

    @cached_property
    def masks(self) -> tuple[int, ...]:
        """Neighbourhoods as Python-int bitsets (bit ``u`` set iff ``u`` is adjacent)."""
        out = []
        for nb in self.adjacency:
            x = 0
            for u in nb:
                x |= 1 << u
            out.append(x)
        return tuple(out)

    @cached_property
    def neighbor_sets(self) -> tuple[frozenset[int], ...]:
        return tuple(frozenset(a) for a in self.adjacency)

    @cached_property
    def label_index(self) -> dict[int, int]:
        return {lab: i for i, lab in enumerate(self.labels)}

    def edges(self) -> list[tuple[int, int]]:
        """All edges ``(u, v)`` with ``u < v`` in lexicographic order."""
        return [(u, v) for u, nb in enumerate(self.adjacency) for v in nb if v > u]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.neighbor_sets[u]

    def adjacency_matrix(self) -> sp.csr_matrix:
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(self.degrees, out=indptr[1:])
        indices = np.fromiter((u for nb in self.adjacency for u in nb), dtype=np.int64,
                              count=2 * self.m)
        data = np.ones(len(indices), dtype=np.float64)
        return sp.csr_matrix((data, indices, indptr), shape=(self.n, self.n))

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.adjacency == other.adjacency and self.labels == other.labels

    def __hash__(self):
        return hash((self.adjacency, self.labels))

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"


def check_vertex_set(g: Graph, s: Iterable[int]) -> VertexSet:
    members = frozenset(int(v) for v in s)
    bad = [v for v in members if not 0 <= v < g.n]
    if bad:
        raise IndexError(f"vertex ids out of range for n={g.n}: {sorted(bad)[:5]}")
    return members


def induced_subgraph(g: Graph, keep: Iterable[int]) -> Graph:
    """Subgraph induced on ``keep``; new ids follow ascending old ids."""
    kept = sorted(check_vertex_set(g, keep))
    if len(kept) == g.n:
        return g
    remap = {old: new for new, old in enumerate(kept)}
    adjacency = tuple(
        tuple(remap[u] for u in g.adjacency[old] if u in remap) for old in kept
    )
    return Graph(adjacency, tuple(g.labels[old] for old in kept))


def remove_edges(g: Graph, doomed: Iterable[tuple[int, int]]) -> Graph:
    gone = {(min(u, v), max(u, v)) for u, v in doomed}
    if not gone:
        return g
    return Graph.from_edges(g.n, (e for e in g.edges() if e not in gone), g.labels)


def edge_density(g: Graph) -> float:
    if g.n < 2:
        raise ValueError(f"edge density undefined for n={g.n}")
    return g.m / (g.n * (g.n - 1) / 2)


# -- reading -----------------------------------------------------------------

FORMATS = ("auto", "edge-list", "matrix-market", "dimacs")


def _sniff(path: Path) -> str:
    with open(path) as fh:
        for line in fh:
            s = line.strip()
            if not s:
                continue
            if s.startswith("%%MatrixMarket"):
                return "matrix-market"
            if s.startswith("p ") or s.startswith("c ") or s == "c":
                return "dimacs"
            if s[0] in "%#":
                continue
            return "edge-list"
    return "edge-list"


def _parse_int(tok: str, lineno: int, path: str) -> int:
    try:
        x = int(tok)
    except ValueError:
        try:
            f = float(tok)
        except ValueError:
            raise GraphFormatError(f"not an integer vertex id: {tok!r}", lineno, path) from None
        if not f.is_integer():
            raise GraphFormatError(f"not an integer vertex id: {tok!r}", lineno, path) from None
        x = int(f)
    if x < 0:
        raise GraphFormatError(f"negative vertex id: {tok}", lineno, path)
    return x


def _read_edge_list(path: Path):
    ids: set[int] = set()
    pairs: list[tuple[int, int]] = []
    lines = 0
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            s = line.strip()
            if not s or s[0] in "%#":
                continue
            toks = s.replace(",", " ").split()
            if len(toks) < 2:
                raise GraphFormatError("expected 'u v'", lineno, str(path))
            u = _parse_int(toks[0], lineno, str(path))
            v = _parse_int(toks[1], lineno, str(path))
            ids.add(u)
            ids.add(v)
            pairs.append((u, v))
            lines += 1
    return sorted(ids), pairs, lines


def _read_matrix_market(path: Path):
    header = None
    size = None
    pairs: list[tuple[int, int]] = []
    declared = 0
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            s = line.strip()
            if header is None:
                if not s.startswith("%%MatrixMarket"):
                    raise GraphFormatError("missing %%MatrixMarket header", lineno, str(path))
                header = s.lower().split()
                if len(header) < 3 or header[1] != "matrix" or header[2] != "coordinate":
                    raise GraphFormatError("only coordinate matrices are supported",
                                           lineno, str(path))
                continue
            if not s or s[0] == "%":
                continue
            toks = s.split()
            if size is None:
                if len(toks) < 3:
                    raise GraphFormatError("expected 'rows cols entries'", lineno, str(path))
                rows, cols, declared = (_parse_int(t, lineno, str(path)) for t in toks[:3])
                size = max(rows, cols)
                continue
            if len(toks) < 2:
                raise GraphFormatError("expected 'i j [value]'", lineno, str(path))
            i = _parse_int(toks[0], lineno, str(path))
            j = _parse_int(toks[1], lineno, str(path))
            if not (1 <= i <= size and 1 <= j <= size):
                raise GraphFormatError(f"index ({i}, {j}) outside 1..{size}", lineno, str(path))
            pairs.append((i, j))
    if header is None or size is None:
        raise GraphFormatError("truncated MatrixMarket file", None, str(path))
    if len(pairs) != declared:
        log.warning("%s: header declares %d entries, found %d", path, declared, len(pairs))
    return list(range(1, size + 1)), pairs, len(pairs)


def _read_dimacs(path: Path):
    size = None
    pairs: list[tuple[int, int]] = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            toks = line.split()
            if not toks or toks[0] == "c":
                continue
            if toks[0] == "p":
                if len(toks) < 4:
                    raise GraphFormatError("expected 'p edge n m'", lineno, str(path))
                size = _parse_int(toks[2], lineno, str(path))
            elif toks[0] in ("e", "a"):
                if size is None:
                    raise GraphFormatError("edge before problem line", lineno, str(path))
                if len(toks) < 3:
                    raise GraphFormatError("expected 'e u v'", lineno, str(path))
                u = _parse_int(toks[1], lineno, str(path))
                v = _parse_int(toks[2], lineno, str(path))
                if not (1 <= u <= size and 1 <= v <= size):
                    raise GraphFormatError(f"vertex outside 1..{size}", lineno, str(path))
                pairs.append((u, v))
            else:
                raise GraphFormatError(f"unknown line type {toks[0]!r}", lineno, str(path))
    if size is None:
        raise GraphFormatError("missing problem line", None, str(path))
    return list(range(1, size + 1)), pairs, len(pairs)


def read_graph(path: str | Path, format: str = "auto") -> tuple[Graph, LoadStats]:
    """Parse ``path`` and return the normalised graph with cleaning statistics."""
    path = Path(path)
    if format not in FORMATS:
        raise ValueError(f"unknown graph format {format!r}; choose from {FORMATS}")
    if format == "auto":
        format = _sniff(path)
    reader = {"edge-list": _read_edge_list, "matrix-market": _read_matrix_market,
              "dimacs": _read_dimacs}[format]
    ids, pairs, lines = reader(path)
    if not ids:
        raise EmptyGraphError(f"{path}: graph has no vertices")

    index = {x: i for i, x in enumerate(ids)}
    seen: set[tuple[int, int]] = set()
    loops = dups = 0
    oriented: set[tuple[int, int]] = set()
    for a, b in pairs:
        u, v = index[a], index[b]
        if u == v:
            loops += 1
            continue
        oriented.add((u, v))
        key = (u, v) if u < v else (v, u)
        if key in seen:
            dups += 1
            continue
        seen.add(key)
    one_way = sum(1 for u, v in oriented if (v, u) not in oriented)
    g = Graph.from_edges(len(ids), seen, ids)
    stats = LoadStats(lines=lines, self_loops=loops, duplicates=dups, directed_only=one_way)
    return g, stats


def load_graph(path: str | Path, format: str = "auto") -> Graph:
    g, stats = read_graph(path, format)
    if stats.self_loops or stats.duplicates:
        log.info("%s: dropped %d self-loops and %d duplicate edges",
                 path, stats.self_loops, stats.duplicates)
    return g


def write_graph(g: Graph, path: str | Path) -> None:
    """Write ``g`` as an edge list in external labels.

    Isolated vertices are written as ``v v``; loaders drop the loop but keep
    the vertex, so ``n`` survives a round trip.
    """
    with open(path, "w") as fh:
        for line in edge_list_lines(g):
            fh.write(line + "\n")


def edge_list_lines(g: Graph) -> list[str]:
    lab = g.labels
    out = [f"{lab[u]} {lab[v]}" for u, v in g.edges()]
    out.extend(f"{lab[v]} {lab[v]}" for v in range(g.n) if not g.adjacency[v])
    return out

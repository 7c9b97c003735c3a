"""Vertex features F1-F10, edge features E1-E9, and the edge-chromatic rule."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .decomposition import Coloring, greedy_coloring, is_proper
from .graph import Graph

VERTEX_FEATURES = (
    "n_vertices",
    "n_edges",
    "degree",
    "lcc",
    "eigencentrality",
    "chi2_degree",
    "chi2_neighbor_degree",
    "chi2_lcc",
    "chi2_neighbor_lcc",
    "chromatic_density",
)

EDGE_FEATURES = (
    "jaccard",
    "dice",
    "inverse_log_weighted",
    "cosine",
    "mean_lcc",
    "mean_degree",
    "mean_eigencentrality",
    "common_neighbors",
    "edge_chromatic_density",
)


class ImproperColoringError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class FeatureMatrix:
    names: tuple[str, ...]
    rows: np.ndarray  # shape (entities, len(names))
    subject: str  # "vertex" or "edge"
    keys: tuple  # vertex labels, or (label_u, label_v) pairs

    def __post_init__(self):
        if self.rows.ndim != 2 or self.rows.shape[1] != len(self.names):
            raise ValueError(f"rows shape {self.rows.shape} does not match {len(self.names)} names")
        if self.rows.shape[0] != len(self.keys):
            raise ValueError("one key per row required")
        if not np.all(np.isfinite(self.rows)):
            raise ValueError("feature matrix contains non-finite values")

    def column(self, name: str) -> np.ndarray:
        return self.rows[:, self.names.index(name)]

    def select(self, names) -> "FeatureMatrix":
        idx = [self.names.index(x) for x in names]
        return FeatureMatrix(tuple(names), self.rows[:, idx], self.subject, self.keys)

    def to_csv(self, path_or_file) -> None:
        key_cols = ["vertex"] if self.subject == "vertex" else ["u", "v"]
        own = isinstance(path_or_file, (str, Path))
        fh = open(path_or_file, "w", newline="") if own else path_or_file
        try:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(key_cols + list(self.names))
            for key, row in zip(self.keys, self.rows):
                key = [key] if self.subject == "vertex" else list(key)
                w.writerow(key + [repr(float(x)) for x in row])
        finally:
            if own:
                fh.close()

    @classmethod
    def from_csv(cls, path_or_file) -> "FeatureMatrix":
        own = isinstance(path_or_file, (str, Path))
        fh = open(path_or_file, newline="") if own else path_or_file
        try:
            rd = csv.reader(fh)
            header = next(rd)
            subject = "vertex" if header[0] == "vertex" else "edge"
            nkey = 1 if subject == "vertex" else 2
            keys, rows = [], []
            for rec in rd:
                k = [int(x) for x in rec[:nkey]]
                keys.append(k[0] if subject == "vertex" else tuple(k))
                rows.append([float(x) for x in rec[nkey:]])
        finally:
            if own:
                fh.close()
        arr = np.array(rows, dtype=float).reshape(len(rows), len(header) - nkey)
        return cls(tuple(header[nkey:]), arr, subject, tuple(keys))


def triangles_per_vertex(g: Graph) -> np.ndarray:
    """T(v): number of edges among the neighbours of v."""
    if g.m == 0:
        return np.zeros(g.n)
    a = g.adjacency_matrix()
    return np.asarray((a @ a).multiply(a).sum(axis=1)).ravel() / 2.0


def lcc_all(g: Graph) -> np.ndarray:
    deg = g.degrees.astype(float)
    tri = triangles_per_vertex(g)
    out = np.zeros(g.n)
    ok = deg >= 2
    out[ok] = 2.0 * tri[ok] / (deg[ok] * (deg[ok] - 1.0))
    return out


def eigencentrality(g: Graph, tol: float = 1e-10, max_iter: int = 10_000) -> np.ndarray:
    """Leading eigenvector of the adjacency matrix by power iteration.

    Iterates with A + I from the all-ones vector: the shift leaves the
    eigenvectors alone but stops bipartite graphs from oscillating between
    two iterates. Stops once successive unit vectors are within ``tol`` in
    Euclidean norm (which bounds the max-norm change too).
    """
    if g.m == 0:
        raise ValueError("eigencentrality undefined for a graph without edges")
    a = g.adjacency_matrix()
    x = np.ones(g.n) / math.sqrt(g.n)
    for _ in range(max_iter):
        y = a @ x + x
        y /= np.linalg.norm(y)
        done = np.linalg.norm(y - x) < tol
        x = y
        if done:
            break
    return x


def chi_square_scores(g: Graph, quantity: str = "degree", values: np.ndarray | None = None):
    """Per-vertex Pearson contributions (O - E)^2 / E against the graph mean.

    Returns ``(self_scores, neighbor_mean_scores)``.
    """
    if values is None:
        if quantity == "degree":
            values = g.degrees.astype(float)
        elif quantity == "lcc":
            values = lcc_all(g)
        else:
            raise ValueError(f"unknown quantity {quantity!r}")
    values = np.asarray(values, dtype=float)
    if g.n == 0:
        return np.zeros(0), np.zeros(0)
    expected = values.mean()
    if expected <= 0:
        return np.zeros(g.n), np.zeros(g.n)
    own = (values - expected) ** 2 / expected
    return own, _neighbor_mean(g, own)


def _neighbor_mean(g: Graph, values: np.ndarray) -> np.ndarray:
    if g.m == 0:
        return np.zeros(g.n)
    deg = g.degrees.astype(float)
    sums = g.adjacency_matrix() @ values
    out = np.zeros(g.n)
    ok = deg > 0
    out[ok] = sums[ok] / deg[ok]
    return out


def _require_proper(g: Graph, c: Coloring) -> None:
    if not is_proper(g, c):
        raise ImproperColoringError("coloring is not proper for this graph")


def local_chromatic_density(g: Graph, c: Coloring) -> np.ndarray:
    """Fraction of the coloring's ``k`` colors seen in each neighbourhood."""
    _require_proper(g, c)
    if c.k == 0:
        return np.zeros(g.n)
    col = c.color
    return np.array([len({col[u] for u in nb}) / c.k for nb in g.adjacency], dtype=float)


def vertex_features(g: Graph) -> FeatureMatrix:
    """The ten per-vertex features, one row per internal vertex id."""
    n = g.n
    if n == 0:
        raise ValueError("vertex features need a non-empty graph")
    deg = g.degrees.astype(float)
    lcc = lcc_all(g)
    # an edgeless graph has no leading eigenvector; every vertex is equally peripheral
    eig = eigencentrality(g) if g.m else np.zeros(n)
    chi_deg, chi_nbr_deg = chi_square_scores(g, values=deg)
    chi_lcc, chi_nbr_lcc = chi_square_scores(g, values=lcc)
    chrom = local_chromatic_density(g, greedy_coloring(g))
    rows = np.column_stack([
        np.full(n, float(n)),
        np.full(n, float(g.m)),
        deg,
        lcc,
        eig,
        chi_deg,
        chi_nbr_deg,
        chi_lcc,
        chi_nbr_lcc,
        chrom,
    ])
    return FeatureMatrix(VERTEX_FEATURES, rows, "vertex", g.labels)


def _common(g: Graph, u: int, v: int) -> frozenset[int]:
    return g.neighbor_sets[u] & g.neighbor_sets[v]


def edge_features(g: Graph, c: Coloring | None = None) -> FeatureMatrix:
    if c is None:
        c = greedy_coloring(g)
    _require_proper(g, c)
    edges = g.edges()
    lab = g.labels
    if not edges:
        return FeatureMatrix(EDGE_FEATURES, np.zeros((0, len(EDGE_FEATURES))), "edge", ())
    deg = g.degrees
    lcc = lcc_all(g)
    eig = eigencentrality(g)
    col = c.color
    nbrs = g.neighbor_sets
    rows = []
    for u, v in edges:
        common = nbrs[u] & nbrs[v]
        nc = len(common)
        union = len(nbrs[u] | nbrs[v])
        inv_log = 0.0
        for w in common:
            assert deg[w] >= 2, "a common neighbour has degree at least 2"
            inv_log += 1.0 / math.log(deg[w])
        rows.append((
            nc / union,
            2.0 * nc / (deg[u] + deg[v]),
            inv_log,
            nc / math.sqrt(deg[u] * deg[v]),
            (lcc[u] + lcc[v]) / 2.0,
            (deg[u] + deg[v]) / 2.0,
            (eig[u] + eig[v]) / 2.0,
            float(nc),
            len({col[w] for w in common}) / c.k,
        ))
    keys = tuple((lab[u], lab[v]) for u, v in edges)
    return FeatureMatrix(EDGE_FEATURES, np.array(rows, dtype=float), "edge", keys)


def edge_chromatic_rule(g: Graph, c: Coloring, k: int) -> list[tuple[int, int]]:
    """Edges whose common neighbourhood shows fewer than ``k - 2`` colors.

    Such an edge lies in no ``k``-clique, so deleting it keeps every one.
    """
    if k < 2:
        raise ValueError(f"clique size estimate must be >= 2, got {k}")
    _require_proper(g, c)
    col = c.color
    return [(u, v) for u, v in g.edges()
            if len({col[w] for w in _common(g, u, v)}) < k - 2]


def vertex_chromatic_rule(g: Graph, c: Coloring, k: int) -> list[int]:
    """Vertices whose neighbourhood shows fewer than ``k - 1`` colors."""
    _require_proper(g, c)
    col = c.color
    return [v for v in range(g.n) if len({col[u] for u in g.adjacency[v]}) < k - 1]

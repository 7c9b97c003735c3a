"""Exact maximum clique enumeration.

The main search is a bitset branch-and-bound in the style of Tomita's MCQ:
candidates are greedily colored and the color count bounds the clique that
can still be added. Because we list *all* maximum cliques, a branch is cut
only when it cannot reach the current best size (``<``, not ``<=``).
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .graph import Graph, VertexSet, check_vertex_set


class BudgetExceeded(RuntimeError):
    def __init__(self, nodes: int, seconds: float):
        self.nodes = nodes
        self.seconds = seconds
        super().__init__(f"search budget exhausted after {nodes} nodes, {seconds:.3f}s")


@dataclass(frozen=True)
class CliqueSet:
    omega: int
    cliques: tuple[tuple[int, ...], ...]
    covered: VertexSet

    @classmethod
    def from_cliques(cls, omega: int, cliques: Iterable[Iterable[int]]) -> "CliqueSet":
        canon = sorted({tuple(sorted(c)) for c in cliques})
        covered = frozenset(v for c in canon for v in c)
        return cls(omega, tuple(canon), covered)

    @property
    def count(self) -> int:
        return len(self.cliques)


@dataclass(frozen=True)
class Budget:
    seconds: float | None = None
    nodes: int | None = None


def is_clique(g: Graph, s: Iterable[int]) -> bool:
    members = sorted(check_vertex_set(g, s))
    nbrs = g.neighbor_sets
    return all(v in nbrs[u] for i, u in enumerate(members) for v in members[i + 1:])


def _core_order(g: Graph) -> list[int]:
    from .decomposition import core_numbers

    core = core_numbers(g).core
    deg = g.degrees
    return sorted(range(g.n), key=lambda v: (-core[v], -deg[v], v))


def enumerate_max_cliques(g: Graph, budget: Budget | None = None) -> CliqueSet:
    """Return ω(g) and every maximum clique, in canonical order.

    Raises :class:`BudgetExceeded` rather than returning a partial answer.
    """
    n = g.n
    if n == 0:
        raise ValueError("cannot enumerate cliques of an empty graph")
    budget = budget or Budget()

    # Bit i of a candidate set is the i-th vertex of the search order, so the
    # greedy coloring inside the search always visits vertices in that order.
    order = _core_order(g)
    pos = {v: i for i, v in enumerate(order)}
    adj = [0] * n
    for v in range(n):
        x = 0
        for u in g.adjacency[v]:
            x |= 1 << pos[u]
        adj[pos[v]] = x

    best = 0
    found: list[tuple[int, ...]] = []
    nodes = 0
    deadline = None if budget.seconds is None else time.monotonic() + budget.seconds
    max_nodes = budget.nodes
    start = time.monotonic()
    clique: list[int] = []

    def color_sort(cand: int, need: int):
        # Vertices with color < need can never complete a best-size clique, so
        # they are left out of the branching list (they stay in ``cand``).
        verts: list[int] = []
        colors: list[int] = []
        color = 0
        rest = cand
        while rest:
            color += 1
            q = rest
            while q:
                low = q & -q
                v = low.bit_length() - 1
                q &= ~adj[v] & ~low
                rest &= ~low
                if color >= need:
                    verts.append(v)
                    colors.append(color)
        return verts, colors

    def expand(cand: int):
        nonlocal best, found, nodes
        nodes += 1
        if (nodes & 1023) == 0:
            if max_nodes is not None and nodes > max_nodes:
                raise BudgetExceeded(nodes, time.monotonic() - start)
            if deadline is not None and time.monotonic() > deadline:
                raise BudgetExceeded(nodes, time.monotonic() - start)
        depth = len(clique)
        verts, colors = color_sort(cand, best - depth)
        for i in range(len(verts) - 1, -1, -1):
            if depth + colors[i] < best:
                return
            v = verts[i]
            clique.append(v)
            sub = cand & adj[v]
            if sub:
                expand(sub)
            else:
                size = depth + 1
                if size > best:
                    best = size
                    found = [tuple(clique)]
                elif size == best:
                    found.append(tuple(clique))
            clique.pop()
            cand &= ~(1 << v)

    if max_nodes is not None and max_nodes < 1:
        raise BudgetExceeded(0, 0.0)
    expand((1 << n) - 1)
    return CliqueSet.from_cliques(best, ([order[i] for i in c] for c in found))


def brute_force_enumerate(g: Graph) -> CliqueSet:
    """Reference enumeration: visit every clique of ``g`` by extension."""
    if g.n > 20:
        raise ValueError(f"brute force limited to n <= 20, got {g.n}")
    if g.n == 0:
        raise ValueError("cannot enumerate cliques of an empty graph")
    masks = g.masks
    best = 0
    found: list[tuple[int, ...]] = []

    def grow(members: list[int], cand: int):
        nonlocal best, found
        size = len(members)
        if size > best:
            best, found = size, [tuple(members)]
        elif size == best:
            found.append(tuple(members))
        while cand:
            low = cand & -cand
            v = low.bit_length() - 1
            cand &= ~low
            # only higher ids extend, so each clique is produced once
            members.append(v)
            grow(members, cand & masks[v])
            members.pop()

    grow([], (1 << g.n) - 1)
    return CliqueSet.from_cliques(best, found)


# -- reports -----------------------------------------------------------------

def format_report(cs: CliqueSet, g: Graph, list_cliques: bool = True) -> str:
    lines = [f"omega={cs.omega} count={cs.count}"]
    if list_cliques:
        lab = g.labels
        lines.extend(" ".join(str(lab[v]) for v in c) for c in cs.cliques)
    return "\n".join(lines) + "\n"


def parse_report(text: str, g: Graph) -> CliqueSet:
    """Inverse of :func:`format_report` (requires the clique lines)."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty clique report")
    head = dict(tok.split("=", 1) for tok in lines[0].split())
    try:
        omega, count = int(head["omega"]), int(head["count"])
    except (KeyError, ValueError):
        raise ValueError(f"bad clique report header: {lines[0]!r}") from None
    index = g.label_index
    cliques = []
    for ln in lines[1:]:
        try:
            c = [index[int(tok)] for tok in ln.split()]
        except (KeyError, ValueError):
            raise ValueError(f"clique line refers to unknown vertex: {ln!r}") from None
        if len(c) != omega:
            raise ValueError(f"clique of size {len(c)} in a report with omega={omega}")
        cliques.append(c)
    if len(cliques) != count:
        raise ValueError(f"report lists {len(cliques)} cliques, header says {count}")
    return CliqueSet.from_cliques(omega, cliques)


def read_report(path: str | Path, g: Graph) -> CliqueSet:
    return parse_report(Path(path).read_text(), g)

"""Fiber graphs H: builtin generators, file loading, hypothesis checks."""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from .graphs import WeightedGraph, complete_graph, cycle_graph
from .io import read_edge_list


def parse_fiber(spec: str) -> WeightedGraph:
    """Builtin name (``K2``, ``K<k>``, ``cycle-<k>``) or path to an edge-list file."""
    m = re.fullmatch(r"K(\d+)", spec)
    if m:
        return complete_graph(int(m.group(1)))
    m = re.fullmatch(r"cycle-(\d+)", spec)
    if m:
        return cycle_graph(int(m.group(1)))
    path = Path(spec)
    if path.is_file():
        return read_edge_list(path)
    raise ValueError(f"unknown fiber {spec!r}: expected K<k>, cycle-<k> or an edge-list file")


def _refine(adj: list[list[tuple[int, object]]], colors: list[int]) -> list[int]:
    """Colour refinement to the coarsest stable partition finer than ``colors``."""
    while True:
        sigs = [(colors[v], tuple(sorted((colors[u], wt) for u, wt in adj[v]))) for v in range(len(adj))]
        names = {sig: i for i, sig in enumerate(sorted(set(sigs)))}
        new = [names[sig] for sig in sigs]
        if len(names) == len(set(colors)):
            return new
        colors = new


def _extend_to_automorphism(g: WeightedGraph, adj, colors: list[int]) -> bool:
    n = g.vertex_count
    colors = _refine(adj, colors)
    left, right = colors[:n], colors[n:]
    if sorted(left) != sorted(right):
        return False
    cells: dict[int, list[int]] = {}
    for v, c in enumerate(left):
        cells.setdefault(c, []).append(v)
    open_cells = [c for c, vs in cells.items() if len(vs) > 1]
    if not open_cells:
        image = {v: right.index(c) for v, c in enumerate(left)}
        return all(g.has_edge(image[u], image[v]) and g.weight(image[u], image[v]) == wt for u, v, wt in g.edges)
    cell = min(open_cells, key=lambda c: len(cells[c]))
    v = cells[cell][0]
    fresh = max(colors) + 1
    for u in (x for x in range(n) if right[x] == cell):
        trial = list(colors)
        trial[v] = trial[n + u] = fresh
        if _extend_to_automorphism(g, adj, trial):
            return True
    return False


def has_automorphism_mapping(g: WeightedGraph, src: int, dst: int) -> bool:
    """Whether some weight-preserving automorphism sends ``src`` to ``dst``.

    Individualize-and-refine search on two copies of ``g`` side by side.
    """
    n = g.vertex_count
    adj: list[list[tuple[int, object]]] = [[] for _ in range(2 * n)]
    for u, v, wt in g.edges:
        for off in (0, n):
            adj[u + off].append((v + off, wt))
            adj[v + off].append((u + off, wt))
    colors = [0] * (2 * n)
    colors[src] = colors[n + dst] = 1
    return _extend_to_automorphism(g, adj, colors)


def is_vertex_transitive(g: WeightedGraph) -> bool:
    """Weight-preserving automorphisms reach every vertex from vertex 0."""
    if not g.is_regular():
        return False
    return all(has_automorphism_mapping(g, 0, t) for t in range(1, g.vertex_count))


@dataclass(frozen=True)
class FiberHypotheses:
    connected: bool
    regular: bool
    transitive: bool
    exceeds_d_5_2: bool
    note: str = "'d large compared to the fiber degree' has no quantitative form and is not checked"

    def as_dict(self) -> dict:
        return {
            "connected": self.connected,
            "regular": self.regular,
            "transitive": self.transitive,
            "size_exceeds_d_5_2": self.exceeds_d_5_2,
            "note": self.note,
        }


def check_fiber(h: WeightedGraph, d: int) -> FiberHypotheses:
    """Flag which structural hypotheses on H hold. Nothing is enforced."""
    return FiberHypotheses(
        connected=h.is_connected(),
        regular=h.is_regular(),
        transitive=is_vertex_transitive(h),
        exceeds_d_5_2=h.vertex_count > d ** 2.5,
    )

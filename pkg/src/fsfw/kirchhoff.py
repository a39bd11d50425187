"""Independent spanning-tree counters: weighted matrix-tree determinant and enumeration."""

from __future__ import annotations

import heapq
import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from gmpy2 import mpq, mpz

from .graphs import ProductGraph, WeightedGraph

DEFAULT_ENUMERATION_CAP = 12
DEFAULT_PATHS_CAP = 4096
BAREISS_MAX_VERTICES = 64


@dataclass(frozen=True)
class SpanningTree:
    edges: frozenset  # of (u, v) with u < v
    weight: object

    def path(self, a: int, b: int) -> list[int]:
        """Vertices of the unique tree path from ``a`` to ``b``."""
        adj: dict[int, list[int]] = {}
        for u, v in self.edges:
            adj.setdefault(u, []).append(v)
            adj.setdefault(v, []).append(u)
        prev = {a: None}
        queue = deque([a])
        while queue:
            x = queue.popleft()
            if x == b:
                break
            for y in adj.get(x, ()):
                if y not in prev:
                    prev[y] = x
                    queue.append(y)
        if b not in prev:
            raise ValueError(f"{a} and {b} are not joined by the tree")
        out = [b]
        while out[-1] != a:
            out.append(prev[out[-1]])
        return out[::-1]


def bareiss_determinant(matrix) -> int:
    """Determinant of an integer matrix by fraction-free elimination."""
    m = [[mpz(x) for x in row] for row in matrix]
    n = len(m)
    if n == 0:
        return 1
    sign = 1
    prev = mpz(1)
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = m[k][k]
        row_k = m[k]
        for i in range(k + 1, n):
            row_i = m[i]
            lead = row_i[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * pivot - lead * row_k[j]) // prev
            row_i[k] = 0
        prev = pivot
    return int(sign * m[n - 1][n - 1])


def _merged_edges(edges) -> dict[tuple[int, int], Fraction]:
    merged: dict[tuple[int, int], Fraction] = {}
    for u, v, wt in edges:
        if u == v:
            continue
        key = (min(u, v), max(u, v))
        merged[key] = merged.get(key, 0) + Fraction(wt)
    return merged


def _bareiss_count(n: int, merged) -> Fraction:
    # drop the last row/column of the Laplacian; clear denominators first
    size = n - 1
    if size == 0:
        return Fraction(1)
    scale = 1
    for wt in merged.values():
        scale = scale * wt.denominator // math.gcd(scale, wt.denominator)
    lap = [[0] * size for _ in range(size)]
    for (u, v), wt in merged.items():
        iw = wt.numerator * (scale // wt.denominator)
        if u < size:
            lap[u][u] += iw
        if v < size:
            lap[v][v] += iw
        if u < size and v < size:
            lap[u][v] -= iw
            lap[v][u] -= iw
    return Fraction(bareiss_determinant(lap), scale**size)


def _schur_count(n: int, merged) -> Fraction:
    # exact Gaussian elimination on the sparse reduced Laplacian, min-degree order
    drop = n - 1
    diag = [mpq(0)] * n
    rows: list[dict[int, mpq]] = [{} for _ in range(n)]
    for (u, v), wt in merged.items():
        q = mpq(wt.numerator, wt.denominator)
        diag[u] += q
        diag[v] += q
        if u != drop and v != drop:
            rows[u][v] = rows[u].get(v, mpq(0)) - q
            rows[v][u] = rows[v].get(u, mpq(0)) - q
    alive = [v != drop for v in range(n)]
    heap = [(len(rows[v]), v) for v in range(n) if alive[v]]
    heapq.heapify(heap)
    det = mpq(1)
    while heap:
        deg, v = heapq.heappop(heap)
        if not alive[v] or deg != len(rows[v]):
            continue
        pivot = diag[v]
        if pivot == 0:
            return Fraction(0)
        det *= pivot
        alive[v] = False
        items = list(rows[v].items())
        for i, _ in items:
            del rows[i][v]
        for a, (i, li) in enumerate(items):
            diag[i] -= li * li / pivot
            for j, lj in items[a + 1:]:
                val = rows[i].get(j, mpq(0)) - li * lj / pivot
                if val == 0:
                    rows[i].pop(j, None)
                    rows[j].pop(i, None)
                else:
                    rows[i][j] = val
                    rows[j][i] = val
        for i, _ in items:
            heapq.heappush(heap, (len(rows[i]), i))
    return Fraction(int(det.numerator), int(det.denominator))


def tree_count(n: int, edges, method: str = "auto") -> Fraction:
    """Weighted spanning-tree count of a multigraph given as ``(u, v, weight)`` triples.

    Self-loops are ignored and parallel edges add up.
    """
    merged = _merged_edges(edges)
    if method == "auto":
        method = "bareiss" if n <= BAREISS_MAX_VERTICES else "schur"
    if method == "bareiss":
        return _bareiss_count(n, merged)
    if method == "schur":
        return _schur_count(n, merged)
    raise ValueError(f"unknown method {method!r}")


def matrix_tree_count(g: WeightedGraph, method: str = "auto") -> Fraction:
    """Weighted spanning-tree count as a Laplacian cofactor. Returns 0 if disconnected."""
    if not g.exact:
        raise TypeError("matrix_tree_count needs rational weights")
    return tree_count(g.vertex_count, g.edges, method)


def _dsu_find(parent: list[int], x: int) -> int:
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


def _connectable(n, parent, edges) -> bool:
    p = list(parent)
    comps = len({_dsu_find(p, v) for v in range(n)})
    for u, v, _ in edges:
        ru, rv = _dsu_find(p, u), _dsu_find(p, v)
        if ru != rv:
            p[ru] = rv
            comps -= 1
            if comps == 1:
                return True
    return comps == 1


def iter_spanning_trees(g: WeightedGraph, max_vertices: int = DEFAULT_ENUMERATION_CAP) -> Iterator[SpanningTree]:
    n = g.vertex_count
    if n > max_vertices:
        raise ValueError(f"graph has {n} vertices, enumeration cap is {max_vertices}")
    edges = g.edges
    one = Fraction(1) if g.exact else 1.0
    if n == 1:
        yield SpanningTree(frozenset(), one)
        return
    # explicit stack: (next edge index, dsu parents, chosen edge indices)
    stack = [(0, list(range(n)), ())]
    while stack:
        i, parent, chosen = stack.pop()
        if len(chosen) == n - 1:
            weight = one
            for k in chosen:
                weight *= edges[k][2]
            yield SpanningTree(frozenset((edges[k][0], edges[k][1]) for k in chosen), weight)
            continue
        if len(edges) - i < n - 1 - len(chosen):
            continue
        u, v, _ = edges[i]
        if _connectable(n, parent, edges[i + 1:]):
            stack.append((i + 1, parent, chosen))
        ru, rv = _dsu_find(parent, u), _dsu_find(parent, v)
        if ru != rv:
            p2 = list(parent)
            p2[ru] = rv
            stack.append((i + 1, p2, chosen + (i,)))


def enumerate_spanning_trees(g: WeightedGraph, max_vertices: int = DEFAULT_ENUMERATION_CAP) -> list[SpanningTree]:
    """All spanning trees of ``g`` with their weights (small graphs only)."""
    return list(iter_spanning_trees(g, max_vertices))


def _require_k2(g: ProductGraph):
    if not isinstance(g, ProductGraph):
        raise TypeError("classification needs a ProductGraph")
    if g.fiber_size != 2 or g.fiber.edge_count != 1:
        raise ValueError("classification is defined for the fiber K2 only")
    if not g.exact:
        raise TypeError("classification needs rational weights")


def _path_weight(g: WeightedGraph, path: list[int]):
    out = Fraction(1)
    for a, b in zip(path, path[1:]):
        out *= g.weight(a, b)
    return out


def _contracted_count(g: WeightedGraph, path: list[int]) -> Fraction:
    on_path = set(path)
    ids = {}
    nxt = 1
    for v in range(g.vertex_count):
        if v in on_path:
            ids[v] = 0
        else:
            ids[v] = nxt
            nxt += 1
    return tree_count(nxt, [(ids[u], ids[v], wt) for u, v, wt in g.edges])


def count_through_path(g: WeightedGraph, path: list[int]) -> Fraction:
    """Weighted count of spanning trees containing every edge of ``path``: ``w(P) * t(G/P)``."""
    if not g.exact:
        raise TypeError("counting needs rational weights")
    if len(set(path)) != len(path):
        raise ValueError("path must be simple")
    return _path_weight(g, path) * _contracted_count(g, path)


def root_bag_path(g: ProductGraph, x: int) -> list[int]:
    """The only simple (u,0)-(u,1) path crossing in bag ``x``: down layer 0, back up layer 1."""
    xs = g.base.tree_path(g.base.root, x)
    return [g.vertex(y, 0) for y in xs] + [g.vertex(y, 1) for y in reversed(xs)]


def classify_spanning_trees(
    g: ProductGraph,
    max_vertices: int | None = None,
    method: str = "enumerate",
    use_symmetry: bool | None = None,
) -> dict[int, Fraction]:
    """Weighted spanning-tree mass split by how many bags the root-bag path enters.

    ``method="enumerate"`` walks every spanning tree (tiny graphs).
    ``method="paths"`` sums, over each possible path P, ``w(P) * t(G/P)``;
    with ``use_symmetry`` one representative per depth is used, which is
    valid for level-transitive base trees such as perfect trees and balls.
    """
    _require_k2(g)
    root = g.base.root
    a, b = g.vertex(root, 0), g.vertex(root, 1)
    out: dict[int, Fraction] = {}
    if method == "enumerate":
        cap = DEFAULT_ENUMERATION_CAP if max_vertices is None else max_vertices
        for tree in iter_spanning_trees(g, cap):
            m = len({g.bag_of(v) for v in tree.path(a, b)})
            out[m] = out.get(m, 0) + tree.weight
    elif method == "paths":
        cap = DEFAULT_PATHS_CAP if max_vertices is None else max_vertices
        if g.vertex_count > cap:
            raise ValueError(f"graph has {g.vertex_count} vertices, cap is {cap}")
        if use_symmetry is None:
            use_symmetry = g.base.level_transitive()
        elif use_symmetry and not g.base.level_transitive():
            raise ValueError("base tree is not level-transitive")
        depth = g.base.depth
        if use_symmetry:
            reps: dict[int, tuple[int, int]] = {}
            for x in range(g.base.vertex_count):
                rep, count = reps.get(depth[x], (x, 0))
                reps[depth[x]] = (rep, count + 1)
            jobs = list(reps.values())
        else:
            jobs = [(x, 1) for x in range(g.base.vertex_count)]
        for x, mult in jobs:
            path = root_bag_path(g, x)
            m = depth[x] + 1
            mass = mult * count_through_path(g, path)
            out[m] = out.get(m, 0) + mass
    else:
        raise ValueError(f"unknown method {method!r}")
    return dict(sorted(out.items()))

"""Finite weighted graphs: perfect trees, balls, and tree-by-fiber products."""

from __future__ import annotations

import math
from collections import deque
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence


def _coerce_weights(weights: Sequence) -> tuple[list, bool]:
    """Return (weights, exact). Rationals become Fraction, reals stay float."""
    exact = None
    out = []
    for x in weights:
        if isinstance(x, bool):
            raise TypeError("boolean edge weight")
        if isinstance(x, Rational):
            kind, val = True, Fraction(x)
        elif isinstance(x, float):
            if not math.isfinite(x):
                raise ValueError(f"non-finite edge weight {x!r}")
            kind, val = False, x
        else:
            raise TypeError(f"unsupported weight type {type(x).__name__}")
        if exact is None:
            exact = kind
        elif exact != kind:
            raise ValueError("rational and float weights mixed in one graph")
        if val <= 0:
            raise ValueError(f"edge weight must be positive, got {x!r}")
        out.append(val)
    return out, True if exact is None else exact


class WeightedGraph:
    """Undirected graph on vertices ``0..vertex_count-1`` with positive conductances.

    Edges are stored as ``(u, v, weight)`` with ``u < v``. Self-loops and
    repeated edges are rejected. Instances are treated as immutable.
    """

    def __init__(self, vertex_count: int, edges: Iterable[tuple[int, int, object]]):
        if isinstance(vertex_count, bool) or not isinstance(vertex_count, int) or vertex_count < 1:
            raise ValueError(f"vertex_count must be a positive integer, got {vertex_count!r}")
        edges = list(edges)
        weights, self.exact = _coerce_weights([e[2] for e in edges])
        seen = set()
        norm = []
        for (u, v, _), wt in zip(edges, weights):
            if not (0 <= u < vertex_count and 0 <= v < vertex_count):
                raise ValueError(f"edge ({u}, {v}) out of range")
            if u == v:
                raise ValueError(f"self-loop at {u}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ValueError(f"repeated edge {key}")
            seen.add(key)
            norm.append((key[0], key[1], wt))
        self.vertex_count = vertex_count
        self.edges = tuple(norm)
        adj: list[list[tuple[int, object]]] = [[] for _ in range(vertex_count)]
        for u, v, wt in self.edges:
            adj[u].append((v, wt))
            adj[v].append((u, wt))
        self._adj = tuple(tuple(a) for a in adj)
        self._weight = {(u, v): wt for u, v, wt in self.edges}

    def __repr__(self):
        kind = "exact" if self.exact else "float"
        return f"{type(self).__name__}(vertices={self.vertex_count}, edges={len(self.edges)}, {kind})"

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def neighbors(self, v: int) -> tuple[tuple[int, object], ...]:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def strength(self, v: int):
        """Total conductance at ``v``."""
        return sum(wt for _, wt in self._adj[v])

    def weight(self, u: int, v: int):
        return self._weight[(min(u, v), max(u, v))]

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self._weight

    def component_of(self, v: int) -> set[int]:
        seen = {v}
        queue = deque([v])
        while queue:
            x = queue.popleft()
            for y, _ in self._adj[x]:
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return seen

    def is_connected(self) -> bool:
        return len(self.component_of(0)) == self.vertex_count

    def is_regular(self) -> bool:
        return len({self.degree(v) for v in range(self.vertex_count)}) == 1


class TreeGraph(WeightedGraph):
    """Rooted unit-weight tree given by a parent array (``parent[root] == -1``)."""

    def __init__(self, parent: Sequence[int]):
        parent = list(parent)
        roots = [v for v, p in enumerate(parent) if p == -1]
        if len(roots) != 1:
            raise ValueError("parent array must have exactly one root")
        super().__init__(len(parent), [(p, v, 1) for v, p in enumerate(parent) if p != -1])
        self.root = roots[0]
        self.parent = tuple(parent)
        children: list[list[int]] = [[] for _ in parent]
        for v, p in enumerate(parent):
            if p != -1:
                children[p].append(v)
        self.children = tuple(tuple(c) for c in children)
        depth = [-1] * len(parent)
        depth[self.root] = 0
        queue = deque([self.root])
        while queue:
            x = queue.popleft()
            for y in children[x]:
                depth[y] = depth[x] + 1
                queue.append(y)
        if min(depth) < 0:
            raise ValueError("parent array contains a cycle")
        self.depth = tuple(depth)

    @property
    def height(self) -> int:
        return max(self.depth)

    def path_to_root(self, v: int) -> list[int]:
        out = [v]
        while self.parent[out[-1]] != -1:
            out.append(self.parent[out[-1]])
        return out

    def tree_path(self, x: int, y: int) -> list[int]:
        """Vertices on the unique path from ``x`` to ``y``."""
        up_x = self.path_to_root(x)
        up_y = self.path_to_root(y)
        on_x = {v: i for i, v in enumerate(up_x)}
        for j, v in enumerate(up_y):
            if v in on_x:
                return up_x[: on_x[v] + 1] + up_y[:j][::-1]
        raise AssertionError("tree is disconnected")

    def level_transitive(self) -> bool:
        """True when every vertex at a given depth has the same number of children.

        For such trees the root-fixing automorphisms act transitively on each level.
        """
        per_level: dict[int, int] = {}
        for v, kids in enumerate(self.children):
            if per_level.setdefault(self.depth[v], len(kids)) != len(kids):
                return False
        return True


def _check_tree_params(d, n):
    for name, val in (("d", d), ("n", n)):
        if isinstance(val, bool) or not isinstance(val, int):
            raise TypeError(f"{name} must be an integer")
    if d < 3:
        raise ValueError(f"degree d must be at least 3, got {d}")
    if n < 0:
        raise ValueError(f"height n must be nonnegative, got {n}")


def _bfs_tree(root_children: int, other_children: int, height: int) -> TreeGraph:
    parent = [-1]
    frontier = [0]
    for level in range(height):
        nxt = []
        for x in frontier:
            for _ in range(root_children if level == 0 else other_children):
                parent.append(x)
                nxt.append(len(parent) - 1)
        frontier = nxt
    return TreeGraph(parent)


def build_perfect_tree(d: int, n: int) -> TreeGraph:
    """Perfect (d-1)-ary tree A_n of height n, vertices numbered breadth-first."""
    _check_tree_params(d, n)
    return _bfs_tree(d - 1, d - 1, n)


def build_ball(d: int, n: int) -> TreeGraph:
    """Ball T_n of radius n around the root of the d-regular tree."""
    _check_tree_params(d, n)
    return _bfs_tree(d, d - 1, n)


def perfect_tree_size(d: int, n: int) -> int:
    return sum((d - 1) ** i for i in range(n + 1))


def ball_size(d: int, n: int) -> int:
    return 1 + d * sum((d - 1) ** i for i in range(n))


class ProductGraph(WeightedGraph):
    """Cartesian product ``base x fiber`` with fiber edges scaled by ``w``.

    Product vertex ``(x, y)`` has id ``x * k + y`` where ``k`` is the fiber
    size, so the bag of tree vertex ``x`` is the id range ``[x*k, (x+1)*k)``.
    """

    def __init__(self, base: TreeGraph, fiber: WeightedGraph, w):
        if isinstance(w, bool) or not isinstance(w, (Rational, float)):
            raise TypeError(f"w must be a real or rational number, got {type(w).__name__}")
        if not w > 0 or (isinstance(w, float) and not math.isfinite(w)):
            raise ValueError(f"w must be positive and finite, got {w!r}")
        if not fiber.is_connected():
            raise ValueError("fiber graph must be connected")
        exact = isinstance(w, Rational) and fiber.exact
        scale = Fraction(w) if exact else float(w)
        k = fiber.vertex_count
        edges = []
        for x in range(base.vertex_count):
            for y1, y2, fw in fiber.edges:
                edges.append((x * k + y1, x * k + y2, scale * (fw if exact else float(fw))))
        one = Fraction(1) if exact else 1.0
        for x1, x2, _ in base.edges:
            for y in range(k):
                edges.append((x1 * k + y, x2 * k + y, one))
        super().__init__(base.vertex_count * k, edges)
        self.base = base
        self.fiber = fiber
        self.w = scale
        self.fiber_size = k

    def vertex(self, x: int, y: int) -> int:
        if not (0 <= x < self.base.vertex_count and 0 <= y < self.fiber_size):
            raise ValueError(f"no product vertex ({x}, {y})")
        return x * self.fiber_size + y

    def coords(self, v: int) -> tuple[int, int]:
        self._check_vertex(v)
        return divmod(v, self.fiber_size)

    def bag_of(self, v: int) -> int:
        self._check_vertex(v)
        return v // self.fiber_size

    def bag(self, x: int) -> range:
        return range(x * self.fiber_size, (x + 1) * self.fiber_size)

    def depth_of(self, v: int) -> int:
        return self.base.depth[self.bag_of(v)]

    @property
    def central_bag(self) -> int:
        return self.base.root

    def _check_vertex(self, v):
        if isinstance(v, bool) or not isinstance(v, int) or not 0 <= v < self.vertex_count:
            raise ValueError(f"invalid product vertex {v!r}")


def product(base: TreeGraph, fiber: WeightedGraph, w) -> ProductGraph:
    return ProductGraph(base, fiber, w)


def bag_of(g: ProductGraph, v: int) -> int:
    """Tree coordinate of product vertex ``v``."""
    return g.bag_of(v)


def complete_graph(k: int, weight=1) -> WeightedGraph:
    if k < 2:
        raise ValueError("complete fiber needs at least 2 vertices")
    return WeightedGraph(k, [(i, j, weight) for i in range(k) for j in range(i + 1, k)])


def cycle_graph(k: int, weight=1) -> WeightedGraph:
    if k < 3:
        raise ValueError("cycle needs at least 3 vertices")
    return WeightedGraph(k, [(i, (i + 1) % k, weight) for i in range(k)])


def path_graph(k: int, weight=1) -> WeightedGraph:
    return WeightedGraph(k, [(i, i + 1, weight) for i in range(k - 1)])


K2 = complete_graph(2)

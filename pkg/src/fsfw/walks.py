"""Conductance walks, loop erasure, Wilson's algorithm, trips and memorable bags."""

from __future__ import annotations

import weakref
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import _kernels as K
from .graphs import ProductGraph, WeightedGraph
from .kirchhoff import SpanningTree
from .rng import RngStream, as_uniforms

INITIAL_WALK_BUFFER = 1 << 12


class PreconditionError(ValueError):
    """The inputs do not satisfy the hypotheses the check is about."""


@dataclass(frozen=True)
class Csr:
    """Adjacency in compressed rows with cumulative conductances per row."""

    indptr: np.ndarray
    indices: np.ndarray
    cumw: np.ndarray


_CSR_CACHE: "weakref.WeakKeyDictionary[WeightedGraph, Csr]" = weakref.WeakKeyDictionary()


def csr_of(g: WeightedGraph) -> Csr:
    cached = _CSR_CACHE.get(g)
    if cached is not None:
        return cached
    indptr = np.zeros(g.vertex_count + 1, dtype=np.int64)
    indices, cumw = [], []
    for v in range(g.vertex_count):
        acc = 0.0
        for u, wt in g.neighbors(v):
            acc += float(wt)
            indices.append(u)
            cumw.append(acc)
        indptr[v + 1] = len(indices)
    csr = Csr(indptr, np.asarray(indices, dtype=np.int64), np.asarray(cumw, dtype=np.float64))
    _CSR_CACHE[g] = csr
    return csr


@dataclass(frozen=True)
class Walk:
    """Vertex sequence of a walk and the stream that generated it (if any)."""

    vertices: tuple[int, ...]
    rng: RngStream | None = None

    def __len__(self):
        return len(self.vertices)

    def __getitem__(self, i):
        return self.vertices[i]

    def __iter__(self):
        return iter(self.vertices)


def _vertices(walk) -> tuple[int, ...]:
    return walk.vertices if isinstance(walk, Walk) else tuple(walk)


def _stream_of(rng) -> RngStream | None:
    return rng if isinstance(rng, RngStream) else None


def _check_vertex(g: WeightedGraph, v) -> int:
    if isinstance(v, bool) or not isinstance(v, (int, np.integer)) or not 0 <= v < g.vertex_count:
        raise ValueError(f"invalid vertex {v!r}")
    return int(v)


def _target_mask(g: WeightedGraph, stop) -> np.ndarray:
    targets = [stop] if isinstance(stop, (int, np.integer)) else list(stop)
    if not targets:
        raise ValueError("stopping set is empty")
    mask = np.zeros(g.vertex_count, dtype=np.bool_)
    for t in targets:
        mask[_check_vertex(g, t)] = True
    return mask


def _check_reachable(g: WeightedGraph, start: int, mask: np.ndarray) -> None:
    if not any(mask[v] for v in g.component_of(start)):
        raise ValueError("stopping set is unreachable from the start vertex")


def random_walk(g: WeightedGraph, start: int, stop, rng) -> Walk:
    """Conductance walk from ``start`` until it first hits a vertex of ``stop``.

    ``stop`` is a vertex or an iterable of vertices. ``rng`` is an
    :class:`RngStream` (fresh draws) or a :class:`UniformBuffer` (continues
    an existing sequence).
    """
    start = _check_vertex(g, start)
    mask = _target_mask(g, stop)
    _check_reachable(g, start, mask)
    csr = csr_of(g)
    buf = as_uniforms(rng)
    out = np.empty(INITIAL_WALK_BUFFER, dtype=np.int64)
    while True:
        length, pos = K.walk_to_set(csr.indptr, csr.indices, csr.cumw, start, mask, buf.data, buf.pos, out)
        if length == K.OUT_OF_UNIFORMS:
            buf.refill()
        elif length == K.BUFFER_FULL:
            out = np.empty(2 * out.shape[0], dtype=np.int64)
        else:
            buf.pos = pos
            return Walk(tuple(int(x) for x in out[:length]), _stream_of(rng))


def loop_erase(walk):
    """Chronological loop erasure.

    Keeps a growing simple path; a revisit truncates the path back to the
    earlier occurrence. Returns a :class:`Walk` for a Walk, a tuple otherwise.
    """
    path: list = []
    where: dict = {}
    for v in _vertices(walk):
        j = where.get(v)
        if j is None:
            where[v] = len(path)
            path.append(v)
        else:
            for x in path[j + 1:]:
                del where[x]
            del path[j + 1:]
    if isinstance(walk, Walk):
        return Walk(tuple(path), walk.rng)
    return tuple(path)


def lerw(g: WeightedGraph, a: int, b, rng) -> Walk:
    """Loop-erased conductance walk from ``a`` stopped at ``b`` (a vertex or a set)."""
    a = _check_vertex(g, a)
    mask = _target_mask(g, b)
    if mask[a]:
        raise ValueError("start vertex already lies in the stopping set")
    _check_reachable(g, a, mask)
    csr = csr_of(g)
    buf = as_uniforms(rng)
    path = np.empty(g.vertex_count, dtype=np.int64)
    where = np.full(g.vertex_count, -1, dtype=np.int64)
    while True:
        length, pos = K.lerw_to_set(csr.indptr, csr.indices, csr.cumw, a, mask, buf.data, buf.pos, path, where)
        if length == K.OUT_OF_UNIFORMS:
            buf.refill()
            continue
        buf.pos = pos
        return Walk(tuple(int(x) for x in path[:length]), _stream_of(rng))


def _require_connected(g: WeightedGraph) -> None:
    if not g.is_connected():
        raise ValueError("graph is not connected")


def wilson_parent_arrays(g: WeightedGraph, samples: int, rng, root: int = 0,
                         order: Sequence[int] | None = None) -> np.ndarray:
    """``samples`` Wilson trees as parent arrays (row ``i``, entry ``v`` = parent of ``v``)."""
    root = _check_vertex(g, root)
    _require_connected(g)
    if samples < 0:
        raise ValueError("sample count must be nonnegative")
    order_arr = np.asarray(range(g.vertex_count) if order is None else order, dtype=np.int64)
    if sorted(order_arr.tolist()) != list(range(g.vertex_count)):
        raise ValueError("order must be a permutation of the vertices")
    csr = csr_of(g)
    buf = as_uniforms(rng)
    out = np.empty((samples, g.vertex_count), dtype=np.int64)
    row = 0
    while row < samples:
        row, buf.pos = K.wilson_batch(csr.indptr, csr.indices, csr.cumw, root, order_arr, buf.data, buf.pos, out, row)
        if row < samples:
            buf.refill()
    return out


def tree_from_parents(g: WeightedGraph, parent: Sequence[int]) -> SpanningTree:
    edges = frozenset((min(v, int(p)), max(v, int(p))) for v, p in enumerate(parent) if p >= 0)
    weight = Fraction(1) if g.exact else 1.0
    for u, v in edges:
        weight *= g.weight(u, v)
    return SpanningTree(edges, weight)


def wilson_ust(g: WeightedGraph, rng, root: int = 0) -> SpanningTree:
    """One weighted uniform spanning tree by Wilson's algorithm, vertices taken in index order."""
    return tree_from_parents(g, wilson_parent_arrays(g, 1, rng, root)[0])


def wilson_tree_counts(g: WeightedGraph, samples: int, rng, root: int = 0) -> dict[frozenset, int]:
    """How often each spanning tree (as an edge set) appears among ``samples`` Wilson draws."""
    parents = wilson_parent_arrays(g, samples, rng, root)
    rows, counts = np.unique(parents, axis=0, return_counts=True)
    return {tree_from_parents(g, row).edges: int(c) for row, c in zip(rows, counts)}


# trips and memorable bags -----------------------------------------------------


@dataclass(frozen=True)
class Trip:
    """A subwalk that starts and ends in bag ``bag`` and leaves it in between.

    ``start`` is the index of the first vertex inside the walk it came from.
    """

    vertices: tuple[int, ...]
    bag: int
    start: int = 0

    @property
    def end(self) -> int:
        return self.start + len(self.vertices) - 1


def decompose_trips(walk, U: int, g: ProductGraph) -> list[Trip]:
    """Maximal excursions from bag ``U``; steps inside ``U`` separate them.

    A trailing excursion that has not come back to ``U`` is not a trip and is
    dropped.
    """
    seq = _vertices(walk)
    if not seq:
        raise ValueError("empty walk")
    if g.bag_of(seq[0]) != U:
        raise ValueError(f"walk does not start in bag {U}")
    inside = [i for i, v in enumerate(seq) if g.bag_of(v) == U]
    trips = []
    for i, j in zip(inside, inside[1:]):
        if j > i + 1:
            trips.append(Trip(tuple(seq[i:j + 1]), U, i))
    return trips


def _separators(g: ProductGraph, U: int, D: int) -> list[int]:
    return g.base.tree_path(U, D)[1:-1]


def memorable_bags(trip: Trip, g: ProductGraph) -> set[int]:
    """Bags other than the trip's own bag that it visits and may leave on the loop erasure.

    ``D`` qualifies when no bag strictly between the trip's bag and ``D`` has
    all of its vertices visited after the trip's last visit to ``D``.
    """
    seq = trip.vertices
    U = trip.bag
    bags = [g.bag_of(v) for v in seq]
    last: dict[int, int] = {}
    for t, b in enumerate(bags):
        last[b] = t
    out = set()
    for D, tau in last.items():
        if D == U:
            continue
        after = set(seq[tau + 1:])
        covered = any(all(v in after for v in g.bag(s)) for s in _separators(g, U, D))
        if not covered:
            out.add(D)
    return out


def erased_bag_check(walk, trip: Trip, D: int, g: ProductGraph) -> bool:
    """True when the loop erasure of the walk up to the trip's end avoids bag ``D``.

    Requires ``trip`` to be the subwalk of ``walk`` at ``trip.start``, the walk
    to start in the trip's bag, and ``D`` to be visited by the trip without
    being memorable for it; otherwise :class:`PreconditionError` is raised.
    """
    seq = _vertices(walk)
    if not seq or g.bag_of(seq[0]) != trip.bag:
        raise PreconditionError("walk must start in the trip's bag")
    if tuple(seq[trip.start:trip.end + 1]) != trip.vertices:
        raise PreconditionError("trip is not a subwalk of the walk at its recorded offset")
    if D == trip.bag or all(g.bag_of(v) != D for v in trip.vertices):
        raise PreconditionError(f"trip does not visit bag {D}")
    if D in memorable_bags(trip, g):
        raise PreconditionError(f"bag {D} is memorable for the trip")
    erased = loop_erase(seq[:trip.end + 1])
    return all(g.bag_of(v) != D for v in erased)


"""Monte Carlo estimators on the ball of the d-regular tree times a weighted fiber.

All samplers split the requested sample count into fixed chunks; chunk
``i`` draws from ``rng.child(i)``, so results do not depend on the number
of workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernels as K
from .fibers import check_fiber
from .graphs import ProductGraph, WeightedGraph, build_ball, product
from .rng import EstimatorReport, RngStream, Tally, run_chunked
from .walks import csr_of

TRIP_BUFFER = 1 << 14


def _check_count(N) -> int:
    if isinstance(N, bool) or not isinstance(N, int) or N <= 0:
        raise ValueError(f"sample count must be a positive integer, got {N!r}")
    return N


def _check_geometry(d, n, m=None):
    for name, val in (("d", d), ("n", n)) + ((("m", m),) if m is not None else ()):
        if isinstance(val, bool) or not isinstance(val, int):
            raise TypeError(f"{name} must be an integer")
    if d < 3:
        raise ValueError(f"d must be at least 3, got {d}")
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    if m is not None and not 0 <= m < n:
        raise ValueError(f"need 0 <= m < n, got m={m}, n={n}")


def _check_w(w) -> float:
    w = float(w)
    if not (w > 0 and math.isfinite(w)):
        raise ValueError(f"w must be positive and finite, got {w}")
    return w


@dataclass(frozen=True)
class BallSetup:
    """The product graph with per-bag arrays the kernels need."""

    graph: ProductGraph
    bag_of: np.ndarray
    bag_depth: np.ndarray
    bag_parent: np.ndarray
    in_center: np.ndarray


@lru_cache(maxsize=32)
def _ball_setup(d: int, H: WeightedGraph, w: float, n: int) -> BallSetup:
    g = product(build_ball(d, n), H, w)
    k = g.fiber_size
    base = g.base
    bag_of = np.repeat(np.arange(base.vertex_count, dtype=np.int64), k)
    depth = np.asarray(base.depth, dtype=np.int64)
    parent = np.asarray([max(p, 0) for p in base.parent], dtype=np.int64)
    in_center = bag_of == base.root
    return BallSetup(g, bag_of, depth, parent, in_center)


def ball_setup(d: int, H: WeightedGraph, w, n: int) -> BallSetup:
    _check_geometry(d, n)
    return _ball_setup(d, H, _check_w(w), n)


def _center_pair(setup: BallSetup, a, b) -> tuple[int, int]:
    g = setup.graph
    root = g.base.root
    a = g.vertex(root, 0) if a is None else a
    b = g.vertex(root, 1) if b is None else b
    for v in (a, b):
        if not (0 <= v < g.vertex_count) or not setup.in_center[v]:
            raise ValueError(f"vertex {v} is not in the central bag")
    if a == b:
        raise ValueError("endpoints must differ")
    return int(a), int(b)


def lerw_bag_samples(d, H, w, n, N, rng: RngStream, a=None, b=None, workers: int = 1):
    """Per-sample ``(bag count, deepest bag depth)`` of the loop-erased path from ``a`` to ``b``.

    Defaults: ``a`` and ``b`` are fiber vertices 0 and 1 of the central bag.
    """
    N = _check_count(N)
    setup = ball_setup(d, H, w, n)
    a, b = _center_pair(setup, a, b)
    csr = csr_of(setup.graph)
    nv = setup.graph.vertex_count
    target = np.zeros(nv, dtype=np.bool_)
    target[b] = True

    def chunk(stream: RngStream, size: int) -> np.ndarray:
        buf = stream.uniforms()
        bags = np.empty(size, dtype=np.int64)
        deep = np.empty(size, dtype=np.int64)
        path = np.empty(nv, dtype=np.int64)
        where = np.full(nv, -1, dtype=np.int64)
        mark = np.zeros(setup.graph.base.vertex_count, dtype=np.int64)
        row = 0
        while row < size:
            row, buf.pos = K.lerw_bag_batch(csr.indptr, csr.indices, csr.cumw, setup.bag_of, setup.bag_depth,
                                            a, target, buf.data, buf.pos, bags, deep, row, path, where, mark)
            if row < size:
                buf.refill()
        return np.stack([bags, deep], axis=1)

    out = run_chunked(N, rng, chunk, workers)
    return out[:, 0], out[:, 1]


def indicator_report(indicator: np.ndarray) -> EstimatorReport:
    return Tally().add_array(indicator).report()


@dataclass(frozen=True)
class BagCountDistribution:
    counts: dict[int, int]
    samples: int
    reports: dict[int, EstimatorReport]

    def frequency(self, m: int) -> float:
        return self.counts.get(m, 0) / self.samples


def bag_count_distribution(d, H, w, n, N, rng: RngStream, a=None, b=None, workers: int = 1) -> BagCountDistribution:
    """Empirical law of the number of bags on the loop-erased central path, for ``m = 1..n+1``."""
    bags, _ = lerw_bag_samples(d, H, w, n, N, rng, a, b, workers)
    top = max(n + 1, int(bags.max()))
    counts = {m: int(np.count_nonzero(bags == m)) for m in range(1, top + 1)}
    reports = {m: indicator_report(bags == m) for m in counts}
    return BagCountDistribution(counts, N, reports)


def escape_probability(d, H, w, n, m, N, rng: RngStream, a=None, b=None, workers: int = 1) -> EstimatorReport:
    """Probability that the loop-erased path between two central vertices leaves the ball of radius ``m``."""
    _check_geometry(d, n, m)
    _, deep = lerw_bag_samples(d, H, w, n, N, rng, a, b, workers)
    return indicator_report(deep > m)


def trip_memorable_depths(d, H, w, n, N, rng: RngStream, start=None, workers: int = 1) -> np.ndarray:
    """Deepest memorable bag depth (0 if none) for ``N`` independent trips from ``start``.

    A trip begins with a step out of the central bag and ends on its first
    return there.
    """
    N = _check_count(N)
    setup = ball_setup(d, H, w, n)
    g = setup.graph
    start = g.vertex(g.base.root, 0) if start is None else start
    if not (0 <= start < g.vertex_count and setup.in_center[start]):
        raise ValueError(f"vertex {start} is not in the central bag")
    csr = csr_of(g)
    nv, nb, k = g.vertex_count, g.base.vertex_count, g.fiber_size

    def chunk(stream: RngStream, size: int) -> np.ndarray:
        buf = stream.uniforms()
        out = np.empty(size, dtype=np.int64)
        walk = np.empty(TRIP_BUFFER, dtype=np.int64)
        seen = np.zeros(nv, dtype=np.int64)
        cover = np.zeros(nb, dtype=np.int64)
        done = np.zeros(nb, dtype=np.int64)
        row = 0
        while row < size:
            row, pos, status = K.trip_batch(csr.indptr, csr.indices, csr.cumw, setup.bag_of, setup.bag_depth,
                                            setup.bag_parent, k, start, setup.in_center, buf.data, buf.pos,
                                            out, row, walk, seen, cover, done)
            buf.pos = pos
            if status == K.OUT_OF_UNIFORMS:
                buf.refill()
            elif status == K.BUFFER_FULL:
                walk = np.empty(2 * walk.shape[0], dtype=np.int64)
        return out

    return run_chunked(N, rng, chunk, workers)


def memorable_tail_curve(d, H, w, n, ms, N, rng: RngStream, start=None, workers: int = 1) -> dict[int, EstimatorReport]:
    """Tail estimates for several ``m`` from one shared set of trips."""
    ms = list(ms)
    for m in ms:
        _check_geometry(d, n, m)
    depths = trip_memorable_depths(d, H, w, n, N, rng, start, workers)
    return {m: indicator_report(depths > m) for m in ms}


def memorable_tail_probability(d, H, w, n, m, N, rng: RngStream, start=None, workers: int = 1) -> EstimatorReport:
    """Probability that one trip from the central bag has a memorable bag outside the ball of radius ``m``."""
    _check_geometry(d, n, m)
    return memorable_tail_curve(d, H, w, n, [m], N, rng, start, workers)[m]


def phase_probe(d, H, w_grid, n_grid, m, N, rng: RngStream, workers: int = 1) -> list[dict]:
    """Escape estimates for every ``(w, n)`` pair, one row each, with fiber hypothesis flags.

    Row ``i`` uses ``rng.child(i)``. Trend data only; no threshold is inferred.
    """
    w_grid, n_grid = list(w_grid), list(n_grid)
    if not w_grid or not n_grid:
        raise ValueError("w and n grids must be nonempty")
    if not H.is_connected():
        raise ValueError("fiber must be connected")
    flags = check_fiber(H, d).as_dict()
    rows = []
    for i, (w, n) in enumerate((w, n) for w in w_grid for n in n_grid):
        rep = escape_probability(d, H, w, n, m, N, rng.child(i), workers=workers)
        rows.append({"w": float(w), "n": n, "m": m, **rep.as_dict(), "hypotheses": flags})
    return rows

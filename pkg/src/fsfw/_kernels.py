"""Compiled inner loops for conductance walks.

Every kernel reads one uniform per walk step from ``unif`` starting at
``pos``. When the array runs out mid-sample the kernel returns the status
``OUT_OF_UNIFORMS`` together with the position where that sample began, so
the caller can refill and replay the sample from the same draws.
"""

from __future__ import annotations

import numpy as np
from numba import njit

OUT_OF_UNIFORMS = -1
BUFFER_FULL = -2


@njit(cache=True, nogil=True)
def _step(v, indptr, cumw, u):
    """Adjacency slot chosen from ``v`` with probability proportional to conductance."""
    lo = indptr[v]
    hi = indptr[v + 1]
    x = u * cumw[hi - 1]
    for i in range(lo, hi - 1):
        if x < cumw[i]:
            return i
    return hi - 1


@njit(cache=True, nogil=True)
def walk_to_set(indptr, indices, cumw, start, target, unif, pos, out):
    """Walk from ``start`` until ``target[v]``; returns ``(length, pos)`` or ``(status, pos)``."""
    out[0] = start
    length = 1
    v = start
    n_unif = unif.shape[0]
    cap = out.shape[0]
    while not target[v]:
        if pos >= n_unif:
            return OUT_OF_UNIFORMS, pos
        if length >= cap:
            return BUFFER_FULL, pos
        v = indices[_step(v, indptr, cumw, unif[pos])]
        pos += 1
        out[length] = v
        length += 1
    return length, pos


@njit(cache=True, nogil=True)
def lerw_to_set(indptr, indices, cumw, start, target, unif, pos, path, where):
    """Chronological loop erasure of the walk from ``start`` stopped on ``target``.

    ``where`` must be all -1 on entry and is restored before returning.
    """
    n_unif = unif.shape[0]
    path[0] = start
    where[start] = 0
    length = 1
    v = start
    status = 0
    while not target[v]:
        if pos >= n_unif:
            status = OUT_OF_UNIFORMS
            break
        v = indices[_step(v, indptr, cumw, unif[pos])]
        pos += 1
        j = where[v]
        if j >= 0:
            for i in range(j + 1, length):
                where[path[i]] = -1
            length = j + 1
        else:
            where[v] = length
            path[length] = v
            length += 1
    for i in range(length):
        where[path[i]] = -1
    if status < 0:
        return status, pos
    return length, pos


@njit(cache=True, nogil=True)
def wilson_parents(indptr, indices, cumw, root, order, unif, pos, parent, in_tree):
    """One Wilson sample; ``parent[v]`` is the next vertex towards ``root``.

    Uses the last-exit pointers of each walk, which equals attaching the
    loop-erased walk. Returns the new position or ``OUT_OF_UNIFORMS``.
    """
    n_unif = unif.shape[0]
    in_tree[:] = False
    in_tree[root] = True
    parent[root] = -1
    for s in range(order.shape[0]):
        v = order[s]
        u = v
        while not in_tree[u]:
            if pos >= n_unif:
                return OUT_OF_UNIFORMS
            nxt = indices[_step(u, indptr, cumw, unif[pos])]
            pos += 1
            parent[u] = nxt
            u = nxt
        u = v
        while not in_tree[u]:
            in_tree[u] = True
            u = parent[u]
    return pos


@njit(cache=True, nogil=True)
def wilson_batch(indptr, indices, cumw, root, order, unif, pos, out, start_row):
    """Fill rows ``start_row..`` of ``out`` with parent arrays; returns ``(next_row, pos)``."""
    n = indptr.shape[0] - 1
    in_tree = np.zeros(n, dtype=np.bool_)
    row = start_row
    while row < out.shape[0]:
        new_pos = wilson_parents(indptr, indices, cumw, root, order, unif, pos, out[row], in_tree)
        if new_pos < 0:
            break
        pos = new_pos
        row += 1
    return row, pos


@njit(cache=True, nogil=True)
def lerw_bag_batch(indptr, indices, cumw, bag_of, bag_depth, start, target, unif, pos,
                   out_bags, out_depth, start_row, path, where, bag_mark):
    """Per sample: distinct bags and deepest bag depth on the loop-erased path.

    ``bag_mark`` must be all zero on entry and is restored.
    """
    row = start_row
    while row < out_bags.shape[0]:
        length, new_pos = lerw_to_set(indptr, indices, cumw, start, target, unif, pos, path, where)
        if length < 0:
            break
        pos = new_pos
        bags = 0
        deepest = 0
        for i in range(length):
            b = bag_of[path[i]]
            if bag_mark[b] == 0:
                bag_mark[b] = 1
                bags += 1
                if bag_depth[b] > deepest:
                    deepest = bag_depth[b]
        for i in range(length):
            bag_mark[bag_of[path[i]]] = 0
        out_bags[row] = bags
        out_depth[row] = deepest
        row += 1
    return row, pos


@njit(cache=True, nogil=True)
def sample_trip(indptr, indices, cumw, start, in_u, unif, pos, buf):
    """Walk from ``start`` whose first step leaves U, stopped on re-entering U.

    The first step is drawn among the neighbours outside U with probability
    proportional to conductance. Returns ``(length, pos)`` or ``(status, pos)``.
    """
    n_unif = unif.shape[0]
    if pos >= n_unif:
        return OUT_OF_UNIFORMS, pos
    lo = indptr[start]
    hi = indptr[start + 1]
    total = 0.0
    prev = 0.0
    for i in range(lo, hi):
        wt = cumw[i] - prev
        prev = cumw[i]
        if not in_u[indices[i]]:
            total += wt
    x = unif[pos] * total
    pos += 1
    prev = 0.0
    acc = 0.0
    v = -1
    for i in range(lo, hi):
        wt = cumw[i] - prev
        prev = cumw[i]
        if not in_u[indices[i]]:
            v = indices[i]
            acc += wt
            if x < acc:
                break
    buf[0] = start
    buf[1] = v
    length = 2
    cap = buf.shape[0]
    while not in_u[v]:
        if pos >= n_unif:
            return OUT_OF_UNIFORMS, pos
        if length >= cap:
            return BUFFER_FULL, pos
        v = indices[_step(v, indptr, cumw, unif[pos])]
        pos += 1
        buf[length] = v
        length += 1
    return length, pos


@njit(cache=True, nogil=True)
def deepest_memorable(trip, length, bag_of, bag_depth, bag_parent, fiber_size,
                      seen, cover, last_done):
    """Depth of the deepest memorable bag of a trip, 0 if none.

    Scans the trip backwards so that, on reaching the last visit of a bag,
    ``cover`` holds how many of each bag's vertices the remainder visits.
    Scratch arrays must be zero on entry and are restored.
    """
    deepest = 0
    for t in range(length - 1, -1, -1):
        v = trip[t]
        b = bag_of[v]
        if bag_depth[b] > 0 and last_done[b] == 0:
            last_done[b] = 1
            memorable = True
            a = bag_parent[b]
            while bag_depth[a] > 0:
                if cover[a] == fiber_size:
                    memorable = False
                    break
                a = bag_parent[a]
            if memorable and bag_depth[b] > deepest:
                deepest = bag_depth[b]
        if seen[v] == 0:
            seen[v] = 1
            cover[b] += 1
    for t in range(length):
        v = trip[t]
        b = bag_of[v]
        seen[v] = 0
        cover[b] = 0
        last_done[b] = 0
    return deepest


@njit(cache=True, nogil=True)
def trip_batch(indptr, indices, cumw, bag_of, bag_depth, bag_parent, fiber_size, start, in_u,
               unif, pos, out, start_row, buf, seen, cover, last_done):
    """Deepest memorable bag depth for consecutive independent trips.

    Returns ``(next_row, pos, status)`` where status is 0, ``OUT_OF_UNIFORMS``
    or ``BUFFER_FULL``.
    """
    row = start_row
    status = 0
    while row < out.shape[0]:
        length, new_pos = sample_trip(indptr, indices, cumw, start, in_u, unif, pos, buf)
        if length < 0:
            status = length
            break
        pos = new_pos
        out[row] = deepest_memorable(buf, length, bag_of, bag_depth, bag_parent, fiber_size,
                                     seen, cover, last_done)
        row += 1
    return row, pos, status

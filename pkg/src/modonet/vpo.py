"""Validity-preserving operations: network shrinking that keeps the frontier.

Scalar entry points (:func:`weight_shift`, :func:`node_merge`) act on single
nodes; :func:`reduce_sweep`, :func:`prune_parallel_arcs` and
:func:`local_arc_removal` are the whole-network passes used by the solver.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

from .core import as_vector, checked_add, checked_sub, nd_filter, nd_grouped
from .network import Network


@dataclass
class ReductionStats:
    nodes_removed: int = 0
    arcs_removed: int = 0
    shifts_applied: int = 0
    merges_applied: int = 0

    def __iadd__(self, other: ReductionStats) -> ReductionStats:
        for f in fields(self):
            setattr(self, f.name, getattr(self, f.name) + getattr(other, f.name))
        return self


def _inner(net: Network, u: int, what: str) -> None:
    if u in (net.root, net.terminal):
        raise ValueError(f"cannot {what} the root or terminal")
    if not net.node_alive[u]:
        raise ValueError(f"node {u} has been deleted")


def weight_shift(net: Network, u: int, c) -> None:
    """Move ``c`` across node ``u``: out-arcs lose it, in-arcs gain it."""
    _inner(net, u, "shift")
    c = as_vector(c)
    out, inc = net.out_arcs(u), net.in_arcs(u)
    new_out = checked_sub(net.arc_weight[out], c)
    new_in = checked_add(net.arc_weight[inc], c)
    net.arc_weight[out] = new_out
    net.arc_weight[inc] = new_in
    net.node_potential[u] = checked_add(net.node_potential[u], c)


def _out_signature(net: Network, u: int) -> list[tuple[int, ...]]:
    arcs = net.out_arcs(u)
    return sorted((int(net.arc_term[a]), *map(int, net.arc_weight[a])) for a in arcs)


def _absorb(net: Network, keep: int, gone: int) -> int:
    """Merge ``gone`` into ``keep`` (signatures already known equal); returns arcs deleted."""
    out = net.out_arcs(gone)
    for a in out:
        net._kill_arc(int(a))
    inc = net.in_arcs(gone)
    net.arc_term[inc] = keep
    net._indeg[keep] += len(inc)
    net._indeg[gone] -= len(inc)
    net.node_alive[gone] = False
    net._csr.pop("in", None)
    return len(out)


def node_merge(net: Network, u1: int, u2: int) -> bool:
    """Merge ``u2`` into ``u1`` when their outgoing arcs match on (terminal, weight)."""
    if net.node_layer[u1] != net.node_layer[u2]:
        raise ValueError("nodes lie in different layers")
    if u1 == u2:
        raise ValueError("cannot merge a node with itself")
    _inner(net, u1, "merge")
    _inner(net, u2, "merge")
    if _out_signature(net, u1) != _out_signature(net, u2):
        return False
    _absorb(net, u1, u2)
    return True


def _arcs_by_root_layer(net: Network) -> tuple[np.ndarray, np.ndarray]:
    layer = net.node_layer[net.arc_root]
    order = np.argsort(layer, kind="stable")
    bounds = np.searchsorted(layer[order], np.arange(net.n + 3))
    return order, bounds


def reduce_sweep(net: Network) -> ReductionStats:
    """Shift every node by the componentwise minimum of its out-arcs, then merge.

    Layers are processed from ``n`` down to 2; within a layer nodes whose
    sorted (terminal, weight) out-signatures coincide collapse onto the
    lowest id.
    """
    stats = ReductionStats()
    order, bounds = _arcs_by_root_layer(net)
    k = net.k
    for j in range(net.n, 1, -1):
        out = order[bounds[j] : bounds[j + 1]]
        out = out[net.arc_alive[out]]
        into = order[bounds[j - 1] : bounds[j]]
        into = into[net.arc_alive[into]]
        if len(out) == 0:
            continue
        # componentwise minimum of out-arc weights per node
        out = out[np.argsort(net.arc_root[out], kind="stable")]
        roots = net.arc_root[out]
        starts = np.flatnonzero(np.r_[True, roots[1:] != roots[:-1]])
        nodes = roots[starts]
        low = np.minimum.reduceat(net.arc_weight[out], starts, axis=0)
        shifted = np.any(low != 0, axis=1)
        if shifted.any():
            stats.shifts_applied += int(shifted.sum())
            shift = np.zeros((len(net.node_layer), k), dtype=np.int64)
            shift[nodes] = low
            net.arc_weight[out] = checked_sub(net.arc_weight[out], shift[roots])
            net.arc_weight[into] = checked_add(net.arc_weight[into], shift[net.arc_term[into]])
            net.node_potential[nodes] = checked_add(net.node_potential[nodes], low)
        stats_layer = _merge_layer(net, out, roots, starts, nodes, into)
        stats += stats_layer
    net.invalidate()
    return stats


def _merge_layer(net, out, roots, starts, nodes, into) -> ReductionStats:
    stats = ReductionStats()
    if len(nodes) < 2:
        return stats
    k = net.k
    # sorted signature rows, padded to the largest out-degree
    rows = np.concatenate([net.arc_term[out][:, None], net.arc_weight[out]], axis=1)
    keys = tuple(rows.T[::-1]) + (roots,)
    srt = np.lexsort(keys)
    rows = rows[srt]
    deg = np.diff(np.r_[starts, len(out)])
    width = int(deg.max())
    pos = np.arange(len(out)) - np.repeat(starts, deg)
    node_idx = np.repeat(np.arange(len(nodes)), deg)
    sig = np.full((len(nodes), width, 1 + k), np.iinfo(np.int64).min, dtype=np.int64)
    sig[node_idx, pos] = rows
    sig = np.concatenate([deg[:, None], sig.reshape(len(nodes), -1)], axis=1)
    _, first, inv = np.unique(sig, axis=0, return_index=True, return_inverse=True)
    inv = inv.reshape(-1)
    rep = nodes[first][inv]  # nodes are ascending, so first occurrence = lowest id
    gone = rep != nodes
    if not gone.any():
        return stats
    target = np.arange(len(net.node_layer))
    target[nodes] = rep
    dead_out = out[gone[np.repeat(np.arange(len(nodes)), deg)]]
    net.arc_alive[dead_out] = False
    net.arc_term[into] = target[net.arc_term[into]]
    net.node_alive[nodes[gone]] = False
    net._csr = {}
    net._recount()
    stats.merges_applied = int(gone.sum())
    stats.nodes_removed = int(gone.sum())
    stats.arcs_removed = len(dead_out)
    return stats


def prune_parallel_arcs(net: Network) -> int:
    """Drop arcs weakly dominated by a parallel arc (same root and terminal)."""
    alive = np.flatnonzero(net.arc_alive)[::-1]  # descending ids: ties keep the lowest id
    if len(alive) < 2:
        return 0
    pair = net.arc_root[alive] * len(net.node_layer) + net.arc_term[alive]
    _, group = np.unique(pair, return_inverse=True)
    keep = alive[nd_grouped(net.arc_weight[alive], group.reshape(-1))]
    mask = np.zeros(len(net.arc_alive), dtype=bool)
    mask[alive] = True
    mask[keep] = False
    removed = np.flatnonzero(mask)
    net.arc_alive[removed] = False
    net._recount()
    return len(removed)


def _cones(net: Network, u: int, v: int) -> tuple[set[int], set[int]]:
    lu, lv = int(net.node_layer[u]), int(net.node_layer[v])
    fwd, frontier = {u}, {u}
    for _ in range(lu, lv):
        frontier = {int(net.arc_term[a]) for x in frontier for a in net.out_arcs(x)}
        fwd |= frontier
    bwd, frontier = {v}, {v}
    for _ in range(lu, lv):
        frontier = {int(net.arc_root[a]) for x in frontier for a in net.in_arcs(x)}
        bwd |= frontier
    return fwd, bwd


def is_isolating(net: Network, u: int, v: int) -> bool:
    """True iff the u-v subnetwork is entered only at ``u`` and left only at ``v``.

    Equivalent to the forward cone of ``u`` (cut at ``v``'s layer) equalling
    the backward cone of ``v`` (cut at ``u``'s layer).
    """
    if net.node_layer[u] >= net.node_layer[v]:
        raise ValueError("need layer(u) < layer(v)")
    fwd, bwd = _cones(net, u, v)
    return fwd == bwd


def _window_candidates(net: Network, delta: int, max_paths: int) -> list[tuple[int, int]]:
    """(u, span) pairs whose ``span``-step successor set is a single node.

    A cheap vectorised necessary condition for (u, v) to be isolating;
    candidates are confirmed by :func:`_window`. Windows holding a single
    path (nothing to remove) or too many paths are skipped.
    """
    alive = np.flatnonzero(net.arc_alive)
    size = len(net.node_layer)
    paths = np.ones(size)
    path_counts = []
    for _ in range(delta):
        paths = np.bincount(net.arc_root[alive], weights=paths[net.arc_term[alive]], minlength=size)
        path_counts.append(paths)
    pairs = np.unique(net.arc_root[alive] * size + net.arc_term[alive])
    src, dst = pairs // size, pairs % size
    preds = np.bincount(dst, minlength=size)
    lone_child = preds[dst] == 1
    all_lone = np.bincount(src[~lone_child], minlength=size) == 0
    found = []
    level_src, level_dst = src, dst
    order = np.argsort(src, kind="stable")
    src_sorted, dst_sorted = src[order], dst[order]
    for span in range(1, delta + 1):
        counts = np.bincount(level_src, minlength=size)
        single = np.flatnonzero(counts == 1)
        if span == 1:
            v = np.zeros(size, dtype=np.int64)
            v[level_src] = level_dst
            single = single[preds[v[single]] == 1]
        else:
            single = single[all_lone[single]]
        npaths = path_counts[span - 1][single]
        single = single[(npaths >= 2) & (npaths <= max_paths)]
        found.extend((int(u), span) for u in single)
        if span == delta:
            break
        # extend every (u, x) pair by one arc out of x
        lo = np.searchsorted(src_sorted, level_dst, side="left")
        hi = np.searchsorted(src_sorted, level_dst, side="right")
        cnt = hi - lo
        rep = np.repeat(np.arange(len(level_src)), cnt)
        off = np.arange(int(cnt.sum())) - np.repeat(np.cumsum(cnt) - cnt, cnt)
        nxt = np.unique(level_src[rep] * size + dst_sorted[lo[rep] + off])
        level_src, level_dst = nxt // size, nxt % size
    found.sort(key=lambda t: (int(net.node_layer[t[0]]), t[0], t[1]))
    return found


def _window(net: Network, u: int, span: int, max_paths: int):
    """Paths of length ``span`` out of ``u`` if they form an isolating window.

    The window is isolating iff all paths end at one node ``v`` and every
    node past ``u`` receives all of its in-arcs from inside the window,
    which is checked by comparing in-degrees with in-window arc counts.
    """
    paths = [((), u)]
    level = {u}
    for _ in range(span):
        received: dict[int, int] = {}
        for x in level:
            for a in net.out_arcs(x):
                t = int(net.arc_term[a])
                received[t] = received.get(t, 0) + 1
        if any(net.in_degree(t) != c for t, c in received.items()):
            return None
        nxt = []
        for arcs, x in paths:
            for a in net.out_arcs(x):
                nxt.append((arcs + (int(a),), int(net.arc_term[a])))
            if len(nxt) > max_paths:
                return None
        paths = nxt
        level = set(received)
    if len(level) != 1:
        return None
    return [p for p, _ in paths]


def local_arc_removal(net: Network, delta: int = 2, max_paths: int = 4096) -> ReductionStats:
    """Remove arcs whose loss keeps the frontier of an isolating window unchanged.

    Windows are isolating pairs (u, v) at most ``delta`` layers apart. Within
    a window arcs are tried in ascending id order; an arc goes when every
    frontier point of the window is still realised by a path avoiding all
    removed arcs.
    """
    if delta < 1:
        raise ValueError("delta must be >= 1")
    stats = ReductionStats()
    for u, span in _window_candidates(net, delta, max_paths):
        if not net.node_alive[u] or net.node_layer[u] + span > net.n + 1:
            continue
        paths = _window(net, u, span, max_paths)
        if not paths:
            continue
        weights = np.stack([net.arc_weight[list(p)].sum(axis=0) for p in paths])
        front = {tuple(r) for r in nd_filter(weights).tolist()}
        usable = np.ones(len(paths), dtype=bool)
        members = [set(p) for p in paths]
        removed = []
        for a in sorted({a for p in paths for a in p}):
            trial = usable & np.array([a not in m for m in members])
            reached = {tuple(r) for r in weights[trial].tolist()}
            if front <= reached:
                usable = trial
                removed.append(a)
        if not removed:
            continue
        if any(net.arc_root[a] != u for a in removed):
            inner = {int(net.arc_term[p[i]]) for p in paths for i in range(span - 1)}
            net.node_comparable[list(inner)] = False
        arcs_gone, nodes_gone = net.delete_arcs(removed)
        stats.arcs_removed += arcs_gone
        stats.nodes_removed += nodes_gone
    return stats


def apply_vpos(
    net: Network,
    *,
    reduce: bool = True,
    prune: bool = True,
    arc_removal: bool = True,
    delta: int = 2,
) -> ReductionStats:
    """Run the enabled passes in the fixed order reduce, prune, arc removal."""
    stats = ReductionStats()
    if reduce:
        stats += reduce_sweep(net)
    if prune:
        removed = prune_parallel_arcs(net)
        stats.arcs_removed += removed
    if arc_removal:
        stats += local_arc_removal(net, delta=delta)
    return stats

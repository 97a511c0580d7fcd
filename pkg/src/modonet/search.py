"""Pareto frontier enumeration by label setting over a network.

Labels of one layer live in two flat arrays: ``lab`` (m x K objective
vectors) and ``own`` (owning node id), sorted by owner. Extending a layer
forms every (label, arc) sum at once and keeps the per-node skyline.

Top-down labels start from the root offset, bottom-up labels from zero, so a
coupled sum is a full path weight.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .core import checked_add, covered_by_earlier, nd_filter, nd_grouped
from .limits import Budget
from .network import Network

_COUPLE_CHUNK = 1 << 20


@dataclass
class SearchResult:
    frontier: np.ndarray
    labels_td: int = 0
    labels_bu: int = 0
    labels_coupled: int = 0
    meet_layer: int | None = None
    filtered: int = 0
    seconds: float = 0.0

    @property
    def labels(self) -> int:
        return self.labels_td + self.labels_bu


@dataclass
class _Front:
    """Labels of one layer for one search direction."""

    layer: int
    lab: np.ndarray
    own: np.ndarray
    created: int
    # per-layer (arc, parent index) records, only when recovery is requested
    trail: list[tuple[np.ndarray, np.ndarray]] | None = field(default=None)

    @property
    def size(self) -> int:
        return len(self.lab)


class _Layers:
    """Alive arcs grouped by the layer of their root."""

    def __init__(self, net: Network):
        arcs = np.flatnonzero(net.arc_alive)
        layer = net.node_layer[net.arc_root[arcs]]
        order = np.lexsort((net.arc_root[arcs], layer))
        self.arcs = arcs[order]
        self.bounds = np.searchsorted(layer[order], np.arange(net.n + 3))

    def out_of(self, j: int) -> np.ndarray:
        return self.arcs[self.bounds[j] : self.bounds[j + 1]]


def _gather(own: np.ndarray, ends: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """For each entry of ``ends``, the range of labels it owns: (repeat index, label index)."""
    lo = np.searchsorted(own, ends, side="left")
    cnt = np.searchsorted(own, ends, side="right") - lo
    total = int(cnt.sum())
    rep = np.repeat(np.arange(len(ends)), cnt)
    idx = lo[rep] + np.arange(total) - np.repeat(np.cumsum(cnt) - cnt, cnt)
    return rep, idx


def _start(net: Network, forward: bool, record: bool) -> _Front:
    if forward:
        node, lab = net.root, net.root_offset[None, :].copy()
    else:
        node, lab = net.terminal, np.zeros((1, net.k), dtype=np.int64)
    layer = 1 if forward else net.n + 1
    return _Front(layer, lab, np.array([node], dtype=np.int64), 1, [] if record else None)


def _step(net: Network, layers: _Layers, front: _Front, forward: bool, budget: Budget) -> None:
    j = front.layer
    if forward:
        arcs = layers.out_of(j)
        src, dst = net.arc_root[arcs], net.arc_term[arcs]
    else:
        arcs = layers.out_of(j - 1)
        src, dst = net.arc_term[arcs], net.arc_root[arcs]
        order = np.argsort(src, kind="stable")
        arcs, src, dst = arcs[order], src[order], dst[order]
    rep, parent = _gather(front.own, src)
    budget.check_labels(len(parent) + front.size)
    new = checked_add(front.lab[parent], net.arc_weight[arcs[rep]])
    owner = dst[rep]
    keep = nd_grouped(new, owner)
    front.created += len(new)
    if front.trail is not None:
        front.trail.append((arcs[rep[keep]], parent[keep]))
    front.lab, front.own = new[keep], owner[keep]
    front.layer = j + 1 if forward else j - 1


def filter_labels(net: Network, lab: np.ndarray, own: np.ndarray, layer: int, comparator) -> np.ndarray:
    """Mask of labels removed by node-dominance filtering within one layer.

    A label at node u goes when a node v with ``comparator.node_dominates(layer,
    state(v), state(u))`` holds a label at least as good in every component.
    Labels are compared after subtracting each node's accumulated weight
    shift, and nodes whose completions were cut by arc removal never act as
    the dominating side.
    """
    removed = np.zeros(len(lab), dtype=bool)
    if comparator is None or getattr(comparator, "node_dominates", None) is None or net.node_state is None:
        return removed
    if len(lab) < 2:
        return removed
    norm = lab - net.node_potential[own]
    nodes = np.unique(own)
    if len(nodes) < 2:
        return removed
    key = comparator.dominance_key(layer, net.node_state[nodes])
    if key is not None:
        node_key = np.zeros(len(net.node_layer), dtype=np.int64)
        node_key[nodes] = key
        order = np.lexsort(tuple((-norm).T[::-1]) + (own, node_key[own]))
        cov = covered_by_earlier(norm[order], net.node_comparable[own[order]])
        removed[order[cov]] = True
        return removed
    starts = np.searchsorted(own, nodes, side="left")
    ends = np.searchsorted(own, nodes, side="right")
    states = [tuple(int(x) for x in net.node_state[u]) for u in nodes]
    for a, u in enumerate(nodes):
        for b, v in enumerate(nodes):
            if a == b or not net.node_comparable[v] or not comparator.node_dominates(layer, states[b], states[a]):
                continue
            mine = np.arange(starts[a], ends[a])
            mine = mine[~removed[mine]]
            theirs = np.arange(starts[b], ends[b])
            theirs = theirs[~removed[theirs]]
            if len(mine) == 0 or len(theirs) == 0:
                continue
            hit = np.all(norm[theirs][None, :, :] >= norm[mine][:, None, :], axis=2).any(axis=1)
            removed[mine[hit]] = True
    return removed


def _apply_filter(net: Network, front: _Front, comparator) -> int:
    if comparator is None or front.layer in (1, net.n + 1):
        return 0
    gone = filter_labels(net, front.lab, front.own, front.layer, comparator)
    if gone.any():
        front.lab, front.own = front.lab[~gone], front.own[~gone]
        if front.trail is not None:
            arcs, parent = front.trail[-1]
            front.trail[-1] = (arcs[~gone], parent[~gone])
    return int(gone.sum())


def _run(net, layers, front, forward, stop, budget, comparator=None) -> int:
    filtered = 0
    while front.layer != stop:
        _step(net, layers, front, forward, budget)
        if forward:
            filtered += _apply_filter(net, front, comparator)
    return filtered


def couple_layer(td: _Front, bu: _Front) -> tuple[np.ndarray, int]:
    """Frontier from coupling the two fronts node by node; also the number of sums formed."""
    rep, idx = _gather(bu.own, td.own)
    k = td.lab.shape[1]
    parts = []
    for s in range(0, len(rep), _COUPLE_CHUNK):
        r, i = rep[s : s + _COUPLE_CHUNK], idx[s : s + _COUPLE_CHUNK]
        parts.append(nd_filter(checked_add(td.lab[r], bu.lab[i])))
    front = nd_filter(np.concatenate(parts)) if parts else np.zeros((0, k), dtype=np.int64)
    return front, len(rep)


def layer_labels(net: Network, layer: int, forward: bool = True, comparator=None) -> dict[int, np.ndarray]:
    """Label set of every node in ``layer`` (top-down from the root or bottom-up from the terminal)."""
    front = _start(net, forward, False)
    _run(net, _Layers(net), front, forward, layer, Budget(), comparator if forward else None)
    return {int(u): front.lab[front.own == u] for u in np.unique(front.own)}


def propagate_topdown(net: Network, comparator=None, budget: Budget | None = None) -> np.ndarray:
    return solve(net, "td", comparator=comparator, budget=budget).frontier


def propagate_bottomup(net: Network, comparator=None, budget: Budget | None = None) -> np.ndarray:
    return solve(net, "bu", comparator=comparator, budget=budget).frontier


def solve_bidirectional(net: Network, comparator=None, meet_layer: int | None = None, budget: Budget | None = None) -> np.ndarray:
    return solve(net, "coup", comparator=comparator, meet_layer=meet_layer, budget=budget).frontier


def solve(
    net: Network,
    alg: str = "coup",
    *,
    comparator=None,
    meet_layer: int | None = None,
    budget: Budget | None = None,
) -> SearchResult:
    """Frontier of ``net`` (maximize sense, lexicographically sorted).

    ``alg`` is ``td``, ``bu`` or ``coup``. The comparator filters top-down
    labels only. With ``coup`` and no ``meet_layer``, the meeting layer is
    chosen greedily by always extending the side whose current layer holds
    fewer labels (ties extend top-down).
    """
    t0 = time.perf_counter()
    budget = budget or Budget()
    layers = _Layers(net)
    n = net.n
    if alg == "td":
        td = _start(net, True, False)
        filtered = _run(net, layers, td, True, n + 1, budget, comparator)
        res = SearchResult(nd_filter(td.lab), labels_td=td.created, filtered=filtered)
    elif alg == "bu":
        bu = _start(net, False, False)
        _run(net, layers, bu, False, 1, budget)
        frontier = checked_add(bu.lab, net.root_offset) if len(bu.lab) else bu.lab
        res = SearchResult(nd_filter(frontier), labels_bu=bu.created)
    elif alg == "coup":
        td = _start(net, True, False)
        bu = _start(net, False, False)
        filtered = 0
        if meet_layer is not None:
            if not 1 <= meet_layer <= n + 1:
                raise ValueError(f"meeting layer must lie in [1, {n + 1}]")
            filtered += _run(net, layers, td, True, meet_layer, budget, comparator)
            _run(net, layers, bu, False, meet_layer, budget)
        elif n <= 1:
            filtered += _run(net, layers, td, True, n + 1, budget, comparator)
        else:
            filtered += _run(net, layers, td, True, 2, budget, comparator)
            _run(net, layers, bu, False, n, budget)
            while td.layer < bu.layer:
                if td.size <= bu.size:
                    filtered += _run(net, layers, td, True, td.layer + 1, budget, comparator)
                else:
                    _run(net, layers, bu, False, bu.layer - 1, budget)
        frontier, _ = couple_layer(td, bu)
        res = SearchResult(
            frontier,
            labels_td=td.created,
            labels_bu=bu.created,
            labels_coupled=td.created + bu.created,
            meet_layer=td.layer,
            filtered=filtered,
        )
    else:
        raise ValueError(f"unknown algorithm {alg!r}; expected td, bu or coup")
    res.seconds = time.perf_counter() - t0
    return res


# -- witnesses ---------------------------------------------------------------


def topdown_trace(net: Network, budget: Budget | None = None) -> _Front:
    """Unfiltered top-down pass that keeps predecessor records."""
    budget = budget or Budget()
    front = _start(net, True, True)
    _run(net, _Layers(net), front, True, net.n + 1, budget)
    return front


def recover_path(net: Network, target, trace: _Front | None = None) -> list[int]:
    """Arc ids of a root-terminal path whose weight plus root offset is ``target``."""
    trace = trace or topdown_trace(net)
    target = np.asarray(target, dtype=np.int64)
    hit = np.flatnonzero(np.all(trace.lab == target, axis=1))
    if len(hit) == 0:
        raise KeyError(f"{tuple(int(x) for x in target)} is not on the frontier")
    i = int(hit[0])
    path = []
    for arcs, parent in reversed(trace.trail):
        path.append(int(arcs[i]))
        i = int(parent[i])
    return path[::-1]


def recover_solution(net: Network, target, decode=None, trace: _Front | None = None) -> list[int]:
    """Decision vector of a solution reaching ``target`` (maximize-sense path weight)."""
    path = recover_path(net, target, trace)
    decisions = [int(net.arc_decision[a]) for a in path]
    return decode(decisions) if decode is not None else decisions


def recover_all(net: Network, targets, decode=None) -> list[list[int]]:
    trace = topdown_trace(net)
    return [recover_solution(net, t, decode, trace) for t in np.asarray(targets, dtype=np.int64)]

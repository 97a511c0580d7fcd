"""Layered acyclic multi-digraph ("network model").

Nodes and arcs live in flat numpy arrays indexed by dense ids. Deletions are
tombstones (``node_alive`` / ``arc_alive``); :meth:`Network.compact`
renumbers. Layers are numbered ``1 .. n+1``; layer 1 holds the root and
layer ``n+1`` the terminal.

Besides the graph, every node carries

* ``node_state``: the DP state row it was built from (``None`` for
  hand-built networks),
* ``node_potential``: the sum of weight shifts applied at the node, so the
  label filter can map shifted labels back to state coordinates,
* ``node_comparable``: cleared when arc removal shrank the node's
  completions, which disqualifies it as the dominating side of a label
  filter.
"""

from __future__ import annotations

from collections.abc import Iterator, Sequence

import numpy as np

from .core import INT64_MIN, as_points, as_vector, checked_add, nd_filter

NO_DECISION = INT64_MIN


def state_key(state) -> bytes:
    """Canonical serialisation of a DP state (a sequence of ints).

    Equal states give equal keys and the key *is* the state, so distinct
    states can never collide.
    """
    return b"".join(int(x).to_bytes(8, "big", signed=True) for x in state)


class Network:
    def __init__(
        self,
        *,
        k: int,
        n: int,
        node_layer,
        arc_root,
        arc_term,
        arc_weight,
        arc_decision=None,
        node_state=None,
        root_offset=None,
    ):
        if n < 1:
            raise ValueError("a network needs at least one stage")
        self.k = int(k)
        self.n = int(n)
        self.node_layer = np.asarray(node_layer, dtype=np.int64).copy()
        n_nodes = len(self.node_layer)
        self.node_alive = np.ones(n_nodes, dtype=bool)
        self.node_state = None if node_state is None else np.asarray(node_state, dtype=np.int64).copy()
        self.node_potential = np.zeros((n_nodes, self.k), dtype=np.int64)
        self.node_comparable = np.full(n_nodes, self.node_state is not None)
        self.arc_root = np.asarray(arc_root, dtype=np.int64).copy()
        self.arc_term = np.asarray(arc_term, dtype=np.int64).copy()
        self.arc_weight = as_points(arc_weight, self.k).reshape(-1, self.k).copy()
        if arc_decision is None:
            arc_decision = np.full(len(self.arc_root), NO_DECISION, dtype=np.int64)
        self.arc_decision = np.asarray(arc_decision, dtype=np.int64).copy()
        self.arc_alive = np.ones(len(self.arc_root), dtype=bool)
        if root_offset is None:
            root_offset = np.zeros(self.k, dtype=np.int64)
        self.root_offset = as_vector(root_offset).copy()
        if not (len(self.arc_term) == len(self.arc_root) == len(self.arc_weight) == len(self.arc_decision)):
            raise ValueError("arc arrays have inconsistent lengths")
        first = np.flatnonzero(self.node_layer == 1)
        last = np.flatnonzero(self.node_layer == self.n + 1)
        if len(first) != 1 or len(last) != 1:
            raise ValueError("layers 1 and n+1 must each hold exactly one node")
        self.root = int(first[0])
        self.terminal = int(last[0])
        self._csr: dict[str, tuple[np.ndarray, np.ndarray]] = {}
        self._recount()

    # -- construction helpers -------------------------------------------------

    @classmethod
    def from_layers(cls, layer_sizes: Sequence[int], arcs, k: int | None = None, root_offset=None) -> Network:
        """Build from layer sizes and ``(root, term, weight[, decision])`` tuples.

        Node ids are assigned layer by layer: layer 1 gets id 0, layer 2 the
        next ``layer_sizes[1]`` ids, and so on.
        """
        node_layer = np.repeat(np.arange(1, len(layer_sizes) + 1), layer_sizes)
        arcs = list(arcs)
        if k is None:
            k = len(arcs[0][2])
        roots = [a[0] for a in arcs]
        terms = [a[1] for a in arcs]
        weights = [list(a[2]) for a in arcs]
        decisions = [a[3] if len(a) > 3 and a[3] is not None else NO_DECISION for a in arcs]
        return cls(
            k=k,
            n=len(layer_sizes) - 1,
            node_layer=node_layer,
            arc_root=roots,
            arc_term=terms,
            arc_weight=np.asarray(weights, dtype=np.int64).reshape(-1, k),
            arc_decision=decisions,
            root_offset=root_offset,
        )

    def copy(self) -> Network:
        new = object.__new__(Network)
        for name, value in self.__dict__.items():
            if isinstance(value, np.ndarray):
                value = value.copy()
            new.__dict__[name] = value
        new._csr = {}
        return new

    def compact(self) -> Network:
        """Copy with dead nodes/arcs dropped and ids renumbered densely."""
        keep = np.flatnonzero(self.node_alive)
        keep = keep[np.lexsort((keep, self.node_layer[keep]))]
        remap = np.full(len(self.node_layer), -1, dtype=np.int64)
        remap[keep] = np.arange(len(keep))
        arcs = np.flatnonzero(self.arc_alive)
        new = Network(
            k=self.k,
            n=self.n,
            node_layer=self.node_layer[keep],
            arc_root=remap[self.arc_root[arcs]],
            arc_term=remap[self.arc_term[arcs]],
            arc_weight=self.arc_weight[arcs],
            arc_decision=self.arc_decision[arcs],
            node_state=None if self.node_state is None else self.node_state[keep],
            root_offset=self.root_offset,
        )
        new.node_potential = self.node_potential[keep].copy()
        new.node_comparable = self.node_comparable[keep].copy()
        return new

    # -- bookkeeping ----------------------------------------------------------

    def _recount(self) -> None:
        alive = self.arc_alive
        size = len(self.node_layer)
        self._outdeg = np.bincount(self.arc_root[alive], minlength=size).astype(np.int64)
        self._indeg = np.bincount(self.arc_term[alive], minlength=size).astype(np.int64)

    def invalidate(self) -> None:
        """Drop adjacency caches; call after arc endpoints change in bulk."""
        self._csr = {}
        self._recount()

    def _adjacency(self, which: str) -> tuple[np.ndarray, np.ndarray]:
        if which not in self._csr:
            ends = self.arc_root if which == "out" else self.arc_term
            order = np.argsort(ends, kind="stable")
            indptr = np.zeros(len(self.node_layer) + 1, dtype=np.int64)
            np.cumsum(np.bincount(ends, minlength=len(self.node_layer)), out=indptr[1:])
            self._csr[which] = (indptr, order)
        return self._csr[which]

    def out_arcs(self, u: int) -> np.ndarray:
        indptr, order = self._adjacency("out")
        ids = order[indptr[u] : indptr[u + 1]]
        return ids[self.arc_alive[ids]]

    def in_arcs(self, u: int) -> np.ndarray:
        indptr, order = self._adjacency("in")
        ids = order[indptr[u] : indptr[u + 1]]
        return ids[self.arc_alive[ids]]

    def out_degree(self, u: int) -> int:
        return int(self._outdeg[u])

    def in_degree(self, u: int) -> int:
        return int(self._indeg[u])

    # -- queries --------------------------------------------------------------

    @property
    def num_nodes(self) -> int:
        return int(self.node_alive.sum())

    @property
    def num_arcs(self) -> int:
        return int(self.arc_alive.sum())

    @property
    def state_dim(self) -> int:
        return 0 if self.node_state is None else self.node_state.shape[1]

    def layer(self, j: int) -> np.ndarray:
        return np.flatnonzero(self.node_alive & (self.node_layer == j))

    def layer_sizes(self) -> list[int]:
        counts = np.bincount(self.node_layer[self.node_alive], minlength=self.n + 2)
        return [int(c) for c in counts[1 : self.n + 2]]

    def layer_of_state(self, j: int, state) -> int:
        """Id of the live node in layer ``j`` built from ``state``."""
        if self.node_state is None:
            raise ValueError("network carries no states")
        ids = self.layer(j)
        hit = ids[np.all(self.node_state[ids] == np.asarray(state, dtype=np.int64), axis=1)]
        if len(hit) != 1:
            raise KeyError(f"no unique node with state {tuple(state)} in layer {j}")
        return int(hit[0])

    def node_state_key(self, u: int) -> bytes | None:
        if self.node_state is None:
            return None
        return state_key(self.node_state[u])

    # -- mutation -------------------------------------------------------------

    def _kill_arc(self, a: int) -> None:
        self.arc_alive[a] = False
        self._outdeg[self.arc_root[a]] -= 1
        self._indeg[self.arc_term[a]] -= 1

    def delete_arcs(self, arcs) -> tuple[int, int]:
        """Delete arcs, then cascade-delete nodes left without in- or out-arcs.

        Returns ``(arcs_removed, nodes_removed)`` including the cascade.
        """
        stack: list[int] = []
        arcs_removed = 0
        for a in np.atleast_1d(np.asarray(arcs, dtype=np.int64)):
            a = int(a)
            if self.arc_alive[a]:
                self._kill_arc(a)
                arcs_removed += 1
                stack.append(int(self.arc_root[a]))
                stack.append(int(self.arc_term[a]))
        nodes_removed = 0
        while stack:
            u = stack.pop()
            if not self.node_alive[u] or u in (self.root, self.terminal):
                continue
            if self._outdeg[u] > 0 and self._indeg[u] > 0:
                continue
            self.node_alive[u] = False
            nodes_removed += 1
            for a in np.concatenate([self.out_arcs(u), self.in_arcs(u)]):
                a = int(a)
                if self.arc_alive[a]:
                    self._kill_arc(a)
                    arcs_removed += 1
                    stack.append(int(self.arc_term[a]) if self.arc_root[a] == u else int(self.arc_root[a]))
        return arcs_removed, nodes_removed

    # -- paths ----------------------------------------------------------------

    def iter_paths(self, u: int | None = None, v: int | None = None) -> Iterator[tuple[int, ...]]:
        """All arc-specified paths from ``u`` (default root) to ``v`` (default terminal)."""
        u = self.root if u is None else u
        v = self.terminal if v is None else v
        target_layer = self.node_layer[v]

        def walk(x: int, prefix: tuple[int, ...]):
            if x == v:
                yield prefix
                return
            if self.node_layer[x] >= target_layer:
                return
            for a in self.out_arcs(x):
                yield from walk(int(self.arc_term[a]), prefix + (int(a),))

        yield from walk(u, ())

    def count_paths(self, u: int | None = None, v: int | None = None) -> int:
        u = self.root if u is None else u
        v = self.terminal if v is None else v
        counts = {v: 1}
        for j in range(int(self.node_layer[v]) - 1, int(self.node_layer[u]) - 1, -1):
            for x in self.layer(j):
                c = 0
                for a in self.out_arcs(int(x)):
                    c += counts.get(int(self.arc_term[a]), 0)
                if c:
                    counts[int(x)] = c
        return counts.get(u, 0)

    def all_path_weights(self) -> np.ndarray:
        """Multiset of root-terminal path weights, by exhaustive expansion.

        Independent of the label-setting search (no dominance pruning); meant
        for verification on small networks.
        """
        sets = {self.root: np.zeros((1, self.k), dtype=np.int64)}
        for j in range(1, self.n + 1):
            nxt: dict[int, list[np.ndarray]] = {}
            for x in self.layer(j):
                x = int(x)
                if x not in sets:
                    continue
                for a in self.out_arcs(x):
                    nxt.setdefault(int(self.arc_term[a]), []).append(checked_add(sets[x], self.arc_weight[a]))
            sets = {t: np.concatenate(parts) for t, parts in nxt.items()}
        out = sets.get(self.terminal, np.zeros((0, self.k), dtype=np.int64))
        return checked_add(out, self.root_offset) if len(out) else out

    def enumerated_frontier(self) -> np.ndarray:
        return nd_filter(self.all_path_weights())

    # -- serialisation --------------------------------------------------------

    def _layer_index(self) -> np.ndarray:
        idx = np.full(len(self.node_layer), -1, dtype=np.int64)
        for j in range(1, self.n + 2):
            ids = self.layer(j)
            if self.node_state is not None and len(ids):
                keys = [state_key(self.node_state[u]) for u in ids]
                ids = ids[sorted(range(len(ids)), key=lambda i: (keys[i], ids[i]))]
            idx[ids] = np.arange(len(ids))
        return idx

    def dump(self) -> str:
        """Canonical text form, byte-stable across runs."""
        idx = self._layer_index()
        nodes = []
        for u in np.flatnonzero(self.node_alive):
            key = self.node_state_key(int(u))
            nodes.append((int(self.node_layer[u]), int(idx[u]), "-" if key is None else key.hex()))
        arcs = []
        for a in np.flatnonzero(self.arc_alive):
            r, t = int(self.arc_root[a]), int(self.arc_term[a])
            d = int(self.arc_decision[a])
            arcs.append(
                (
                    (int(self.node_layer[r]), int(idx[r])),
                    (int(self.node_layer[t]), int(idx[t])),
                    None if d == NO_DECISION else d,
                    tuple(int(x) for x in self.arc_weight[a]),
                )
            )
        lines = [f"N {l} {i} {h}" for l, i, h in sorted(nodes)]
        arcs.sort(key=lambda t: (t[0], t[1], -(2**63) if t[2] is None else t[2], t[3]))
        for r, t, d, w in arcs:
            lines.append(f"A {r[0]}.{r[1]} {t[0]}.{t[1]} {'-' if d is None else d} " + " ".join(map(str, w)))
        return "\n".join(lines) + "\n"


def path_weight(net: Network, path: Sequence[int]) -> np.ndarray:
    """Componentwise sum of arc weights along a contiguous arc path."""
    path = [int(a) for a in path]
    total = np.zeros(net.k, dtype=np.int64)
    for i, a in enumerate(path):
        if not net.arc_alive[a]:
            raise ValueError(f"arc {a} has been deleted")
        if i and net.arc_term[path[i - 1]] != net.arc_root[a]:
            raise ValueError(f"path is not contiguous at position {i}")
        total = checked_add(total, net.arc_weight[a])
    return total


def validate(net: Network) -> list[str]:
    """Diagnostics for violated network invariants; empty iff valid."""
    problems: list[str] = []
    sizes = net.layer_sizes()
    if sizes[0] != 1:
        problems.append(f"layer 1 has {sizes[0]} nodes, expected 1")
    if sizes[-1] != 1:
        problems.append(f"layer {net.n + 1} has {sizes[-1]} nodes, expected 1")
    for j, s in enumerate(sizes, start=1):
        if s == 0:
            problems.append(f"layer {j} is empty")
    alive = np.flatnonzero(net.arc_alive)
    dead_end = alive[~net.node_alive[net.arc_root[alive]] | ~net.node_alive[net.arc_term[alive]]]
    for a in dead_end:
        problems.append(f"arc {a} touches a deleted node")
    jump = alive[net.node_layer[net.arc_term[alive]] != net.node_layer[net.arc_root[alive]] + 1]
    for a in jump:
        problems.append(
            f"arc {a} goes from layer {net.node_layer[net.arc_root[a]]} to layer {net.node_layer[net.arc_term[a]]}"
        )
    size = len(net.node_layer)
    outdeg = np.bincount(net.arc_root[alive], minlength=size)
    indeg = np.bincount(net.arc_term[alive], minlength=size)
    for u in np.flatnonzero(net.node_alive):
        if u != net.terminal and outdeg[u] == 0:
            problems.append(f"node {u} (layer {net.node_layer[u]}) has no outgoing arc")
        if u != net.root and indeg[u] == 0:
            problems.append(f"node {u} (layer {net.node_layer[u]}) has no incoming arc")
    if net.node_state is not None:
        for j in range(1, net.n + 2):
            ids = net.layer(j)
            if len(ids) and len(np.unique(net.node_state[ids], axis=0)) != len(ids):
                problems.append(f"layer {j} has duplicate state keys")
    return problems

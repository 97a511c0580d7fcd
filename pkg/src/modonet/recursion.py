"""Recursive (DP) formulations and their compilation into networks.

A :class:`DpModel` describes stages ``1..n``. Stage ``j`` takes a state of
layer ``j`` and a feasible value to a state of layer ``j+1`` while earning a
reward vector. States are fixed-length tuples of ints so a whole layer can
be held as one int64 array.

Subclasses implement the scalar trio ``feasible_values`` / ``transition`` /
``reward``; fast ones also override :meth:`DpModel.expand`, which handles a
whole layer at once and must agree with the scalar definition.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import as_points
from .limits import Budget, InfeasibleError
from .network import NO_DECISION, Network, state_key

__all__ = ["DpModel", "Expansion", "compile_model", "state_key", "unique_rows"]


@dataclass
class Expansion:
    """All arcs leaving one layer: ``parent`` indexes the input state rows."""

    parent: np.ndarray
    value: np.ndarray
    next_state: np.ndarray
    reward: np.ndarray


class DpModel:
    n: int
    k: int
    initial_state: tuple[int, ...]
    # stages whose arcs do not encode a decision variable (e.g. a tour's return leg)
    synthetic_stages: frozenset[int] = frozenset()

    @property
    def root_offset(self) -> tuple[int, ...]:
        return (0,) * self.k

    @property
    def state_dim(self) -> int:
        return len(self.initial_state)

    def feasible_values(self, stage: int, state: tuple[int, ...]) -> list[int]:
        raise NotImplementedError

    def transition(self, stage: int, state: tuple[int, ...], value: int) -> tuple[int, ...]:
        raise NotImplementedError

    def reward(self, stage: int, state: tuple[int, ...], value: int) -> tuple[int, ...]:
        raise NotImplementedError

    # Optional node comparator: True when a node with state ``s1`` dominates
    # one with state ``s2`` in the same layer (for top-down label filtering).
    node_dominates = None

    def dominance_key(self, stage: int, states: np.ndarray) -> np.ndarray | None:
        """Scalar key with ``node_dominates(s1, s2) <=> key(s1) <= key(s2)``, if one exists."""
        return None

    def decode(self, decisions: list[int]) -> list[int]:
        """Map the arc decisions of a root-terminal path to a solution vector."""
        return [d for d in decisions if d != NO_DECISION]

    def expand(self, stage: int, states: np.ndarray) -> Expansion:
        parents, values, nxt, rewards = [], [], [], []
        for i, row in enumerate(states):
            s = tuple(int(x) for x in row)
            for v in self.feasible_values(stage, s):
                parents.append(i)
                values.append(v)
                nxt.append(self.transition(stage, s, v))
                rewards.append(self.reward(stage, s, v))
        d = states.shape[1]
        return Expansion(
            parent=np.asarray(parents, dtype=np.int64),
            value=np.asarray(values, dtype=np.int64),
            next_state=np.asarray(nxt, dtype=np.int64).reshape(-1, d),
            reward=as_points(rewards, self.k).reshape(-1, self.k),
        )


def unique_rows(rows: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Distinct rows in lexicographic order, plus the inverse index."""
    if len(rows) == 0:
        return rows, np.zeros(0, dtype=np.int64)
    if rows.shape[1] == 1:
        uniq, inv = np.unique(rows[:, 0], return_inverse=True)
        return uniq[:, None], inv.reshape(-1)
    uniq, inv = np.unique(rows, axis=0, return_inverse=True)
    return uniq, inv.reshape(-1)


def compile_model(model: DpModel, budget: Budget | None = None) -> Network:
    """Breadth-first expansion of the state-transition graph into a network.

    Each distinct state of a layer becomes one node. States with no feasible
    completion are removed by a backward sweep once the forward pass is done.
    """
    if model.n < 1:
        raise ValueError("model needs at least one stage")
    budget = budget or Budget()
    k = model.k
    states = [np.asarray([model.initial_state], dtype=np.int64).reshape(1, -1)]
    arcs = []
    total = 1
    for j in range(1, model.n + 1):
        exp = model.expand(j, states[-1])
        if exp.reward.shape[1] != k and len(exp.reward):
            raise ValueError(f"stage {j} rewards have length {exp.reward.shape[1]}, expected {k}")
        uniq, inv = unique_rows(exp.next_state)
        decision = exp.value if j not in model.synthetic_stages else np.full(len(exp.value), NO_DECISION)
        arcs.append((exp.parent, inv, exp.reward.reshape(-1, k), decision))
        states.append(uniq.reshape(-1, states[0].shape[1]))
        total += len(uniq)
        budget.check_nodes(total)
        if len(uniq) == 0:
            raise InfeasibleError(f"no state survives stage {j}")
    if len(states[-1]) != 1:
        raise ValueError(f"final stage produced {len(states[-1])} terminal states, expected 1")

    # backward dead-end sweep: keep[j] marks layer-j states with a completion
    keep = [None] * (model.n + 2)
    keep[model.n + 1] = np.ones(1, dtype=bool)
    arc_keep = [None] * (model.n + 1)
    for j in range(model.n, 0, -1):
        parent, term, _, _ = arcs[j - 1]
        arc_keep[j] = keep[j + 1][term]
        keep[j] = np.bincount(parent[arc_keep[j]], minlength=len(states[j - 1])) > 0
    if not keep[1][0]:
        raise InfeasibleError("the initial state has no feasible completion")

    offsets = [0]
    layer_ids = []
    for j in range(1, model.n + 2):
        ids = np.full(len(states[j - 1]), -1, dtype=np.int64)
        ids[keep[j]] = offsets[-1] + np.arange(int(keep[j].sum()))
        layer_ids.append(ids)
        offsets.append(offsets[-1] + int(keep[j].sum()))
    node_layer = np.repeat(np.arange(1, model.n + 2), np.diff(offsets))
    node_state = np.concatenate([states[j - 1][keep[j]] for j in range(1, model.n + 2)])
    roots, terms, weights, decisions = [], [], [], []
    for j in range(1, model.n + 1):
        parent, term, reward, decision = arcs[j - 1]
        m = arc_keep[j]
        roots.append(layer_ids[j - 1][parent[m]])
        terms.append(layer_ids[j][term[m]])
        weights.append(reward[m])
        decisions.append(decision[m])
    return Network(
        k=k,
        n=model.n,
        node_layer=node_layer,
        arc_root=np.concatenate(roots),
        arc_term=np.concatenate(terms),
        arc_weight=np.concatenate(weights),
        arc_decision=np.concatenate(decisions),
        node_state=node_state,
        root_offset=model.root_offset,
    )

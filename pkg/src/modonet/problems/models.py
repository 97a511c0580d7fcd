"""DP formulations of the five problem classes, in the canonical maximize sense.

Minimisation classes negate their rewards, so a path weight is the negated
objective. Every model offers the scalar definition plus a vectorised
``expand`` over a whole layer; the test-suite checks the two agree.

Bit-set states (cover, pack, TSP) are packed into int64 words of
``WORD_BITS`` bits each so they stay non-negative.
"""

from __future__ import annotations

import numpy as np

from ..network import NO_DECISION
from ..recursion import DpModel, Expansion
from .instance import Instance

WORD_BITS = 62


def _pack_bits(indices, words: int) -> np.ndarray:
    out = np.zeros(words, dtype=np.int64)
    for i in indices:
        out[i // WORD_BITS] |= np.int64(1) << np.int64(i % WORD_BITS)
    return out


def _branch(n_states: int, allow_zero: np.ndarray, allow_one: np.ndarray):
    """Parent index and value of every arc, value-0 arcs first."""
    zero = np.flatnonzero(allow_zero)
    one = np.flatnonzero(allow_one)
    parent = np.concatenate([zero, one])
    value = np.concatenate([np.zeros(len(zero), dtype=np.int64), np.ones(len(one), dtype=np.int64)])
    return parent, value


class KnapsackModel(DpModel):
    """State = capacity used so far; the last stage collapses onto ``W``."""

    def __init__(self, inst: Instance):
        p = inst.payload
        self.n, self.k = inst.n, inst.k
        self.capacity = p.capacity
        self.weights = np.asarray(p.weights, dtype=np.int64)
        self.profits = np.asarray(p.profits, dtype=np.int64)
        self.initial_state = (0,)

    def feasible_values(self, stage, state):
        return [0, 1] if state[0] + int(self.weights[stage - 1]) <= self.capacity else [0]

    def transition(self, stage, state, value):
        if stage == self.n:
            return (self.capacity,)
        return (state[0] + value * int(self.weights[stage - 1]),)

    def reward(self, stage, state, value):
        return tuple(int(x) * value for x in self.profits[:, stage - 1])

    def node_dominates(self, stage, s1, s2) -> bool:
        # less capacity used leaves every completion of s2 available to s1
        return s1[0] <= s2[0]

    def dominance_key(self, stage, states):
        return states[:, 0]

    def expand(self, stage, states):
        s = states[:, 0]
        w = self.weights[stage - 1]
        parent, value = _branch(len(s), np.ones(len(s), dtype=bool), s + w <= self.capacity)
        nxt = np.full(len(parent), self.capacity) if stage == self.n else s[parent] + value * w
        return Expansion(parent, value, nxt[:, None], value[:, None] * self.profits[:, stage - 1][None, :])


class _RowModel(DpModel):
    def __init__(self, inst: Instance):
        p = inst.payload
        self.n, self.k = inst.n, inst.k
        self.m = len(p.rows)
        self.words = max(1, -(-self.m // WORD_BITS))
        self.costs = np.asarray(p.costs, dtype=np.int64)
        # contain[j]: rows with a one in column j; last[j]: rows whose last column is j
        self.contain = np.stack([_pack_bits([i for i, r in enumerate(p.rows) if j in r], self.words) for j in range(self.n)])
        self.last = np.stack([_pack_bits([i for i, r in enumerate(p.rows) if r and r[-1] == j], self.words) for j in range(self.n)])
        self.empty_rows = _pack_bits([i for i, r in enumerate(p.rows) if not r], self.words)
        self.all_rows = _pack_bits(range(self.m), self.words)


class SetPackModel(_RowModel):
    """A row's bit is set once it holds a one or has seen its last column.

    Choosing column ``j`` is forbidden while any of its rows is set, so the
    terminal state has every bit set.
    """

    def __init__(self, inst: Instance):
        super().__init__(inst)
        self.initial_state = tuple(int(x) for x in self.empty_rows)

    def feasible_values(self, stage, state):
        blocked = np.any(np.asarray(state, dtype=np.int64) & self.contain[stage - 1])
        return [0] if blocked else [0, 1]

    def transition(self, stage, state, value):
        s = np.asarray(state, dtype=np.int64) | self.last[stage - 1]
        if value:
            s = s | self.contain[stage - 1]
        return tuple(int(x) for x in s)

    def reward(self, stage, state, value):
        return tuple(int(x) * value for x in self.costs[:, stage - 1])

    def expand(self, stage, states):
        contain = self.contain[stage - 1]
        free = ~np.any(states & contain, axis=1)
        parent, value = _branch(len(states), np.ones(len(states), dtype=bool), free)
        nxt = states[parent] | self.last[stage - 1] | (value[:, None] * contain)
        return Expansion(parent, value, nxt, value[:, None] * self.costs[:, stage - 1][None, :])


class SetCoverModel(_RowModel):
    """State = rows not yet covered.

    Skipping column ``j`` is forbidden when an uncovered row has ``j`` as its
    last column, so every surviving path covers all rows and the terminal
    state is empty.
    """

    def __init__(self, inst: Instance):
        super().__init__(inst)
        self.initial_state = tuple(int(x) for x in self.all_rows)

    def feasible_values(self, stage, state):
        forced = np.any(np.asarray(state, dtype=np.int64) & self.last[stage - 1])
        return [1] if forced else [0, 1]

    def transition(self, stage, state, value):
        s = np.asarray(state, dtype=np.int64)
        if value:
            s = s & ~self.contain[stage - 1]
        return tuple(int(x) for x in s)

    def reward(self, stage, state, value):
        return tuple(-int(x) * value for x in self.costs[:, stage - 1])

    def expand(self, stage, states):
        forced = np.any(states & self.last[stage - 1], axis=1)
        parent, value = _branch(len(states), ~forced, np.ones(len(states), dtype=bool))
        nxt = np.where(value[:, None] == 1, states[parent] & ~self.contain[stage - 1], states[parent])
        return Expansion(parent, value, nxt, -value[:, None] * self.costs[:, stage - 1][None, :])


class TspModel(DpModel):
    """State = (bitmask of unvisited cities, current city); cities are 1-based.

    Stages ``1..n-1`` pick the next city; stage ``n`` is the return leg to
    city 1 and carries no decision.
    """

    def __init__(self, inst: Instance):
        if inst.n > WORD_BITS:
            raise ValueError(f"TSP model supports at most {WORD_BITS} cities")
        self.n, self.k = inst.n, inst.k
        self.dist = np.asarray(inst.payload.distances, dtype=np.int64)
        self.initial_state = (((1 << inst.n) - 1) & ~1, 1)
        self.synthetic_stages = frozenset({inst.n})

    def feasible_values(self, stage, state):
        if stage == self.n:
            return [1]
        return [c + 1 for c in range(self.n) if state[0] >> c & 1]

    def transition(self, stage, state, value):
        if stage == self.n:
            return (0, 1)
        return (state[0] & ~(1 << (value - 1)), value)

    def reward(self, stage, state, value):
        return tuple(-int(d[state[1] - 1, value - 1]) for d in self.dist)

    def decode(self, decisions):
        return [1] + [d for d in decisions if d != NO_DECISION]

    def expand(self, stage, states):
        mask, last = states[:, 0], states[:, 1]
        if stage == self.n:
            parent = np.arange(len(states))
            value = np.ones(len(states), dtype=np.int64)
            nxt = np.tile(np.array([[0, 1]], dtype=np.int64), (len(states), 1))
        else:
            bits = (mask[:, None] >> np.arange(self.n)) & 1
            parent, city = np.nonzero(bits)
            value = city + 1
            nxt = np.stack([mask[parent] & ~(np.int64(1) << city), value], axis=1)
        reward = -self.dist[:, last[parent] - 1, value - 1].T
        return Expansion(parent, value, nxt, reward)


class MccavpModel(DpModel):
    """State = (partial sums a^k x for each k, number of ones so far).

    The reward telescopes: stage ``j`` earns ``-(|theta' - b| - |theta - b|)``
    per objective, and the root offset ``-|b|`` makes a full path weigh
    ``-|a^k x - b_k|``. The last stage collapses onto the zero state.
    """

    def __init__(self, inst: Instance):
        p = inst.payload
        self.n, self.k = inst.n, inst.k
        self.coef = np.asarray(p.coefficients, dtype=np.int64)
        self.targets = np.asarray(p.targets, dtype=np.int64)
        self.cardinality = p.cardinality
        self.initial_state = (0,) * (self.k + 1)

    @property
    def root_offset(self):
        return tuple(-abs(int(b)) for b in self.targets)

    def feasible_values(self, stage, state):
        return [0, 1] if state[-1] + 1 <= self.cardinality else [0]

    def transition(self, stage, state, value):
        if stage == self.n:
            return (0,) * (self.k + 1)
        theta = [t + value * int(a) for t, a in zip(state[:-1], self.coef[:, stage - 1])]
        return (*theta, state[-1] + value)

    def reward(self, stage, state, value):
        out = []
        for t, a, b in zip(state[:-1], self.coef[:, stage - 1], self.targets):
            out.append(-(abs(t + value * int(a) - int(b)) - abs(t - int(b))))
        return tuple(out)

    def expand(self, stage, states):
        theta, count = states[:, :-1], states[:, -1]
        parent, value = _branch(len(states), np.ones(len(states), dtype=bool), count + 1 <= self.cardinality)
        before = theta[parent]
        after = before + value[:, None] * self.coef[:, stage - 1][None, :]
        reward = -(np.abs(after - self.targets) - np.abs(before - self.targets))
        if stage == self.n:
            nxt = np.zeros((len(parent), self.k + 1), dtype=np.int64)
        else:
            nxt = np.concatenate([after, (count[parent] + value)[:, None]], axis=1)
        return Expansion(parent, value, nxt, reward)


MODELS = {
    "knapsack": KnapsackModel,
    "setpack": SetPackModel,
    "setcover": SetCoverModel,
    "tsp": TspModel,
    "mccavp": MccavpModel,
}


def build_model(inst: Instance) -> DpModel:
    return MODELS[inst.problem](inst)

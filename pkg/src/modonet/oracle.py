"""Brute-force Pareto frontiers by exhaustive enumeration.

Deliberately naive: every 0/1 vector (or every tour) is evaluated straight
from the instance data, and only the final skyline is shared with the solver.
"""

from __future__ import annotations

from itertools import islice, permutations

import numpy as np

from .core import lex_sorted, nd_filter
from .problems.instance import Instance, evaluate_many

MAX_BINARY_N = 24
MAX_TSP_N = 10
_CHUNK = 1 << 16


def canonical(points: np.ndarray, sense: str) -> np.ndarray:
    """Skyline in the given sense, returned lexicographically sorted."""
    if sense == "max":
        return nd_filter(points)
    return lex_sorted(-nd_filter(-np.asarray(points, dtype=np.int64)))


def _binary_vectors(n: int):
    for start in range(0, 1 << n, _CHUNK):
        ids = np.arange(start, min(start + _CHUNK, 1 << n), dtype=np.int64)
        yield (ids[:, None] >> np.arange(n - 1, -1, -1)) & 1


def _tours(n: int):
    # fixing city 1 first and x_2 < x_n keeps one direction of each cycle
    rest = (p for p in permutations(range(2, n + 1)) if n < 3 or p[0] < p[-1])
    while True:
        block = list(islice(rest, _CHUNK))
        if not block:
            return
        yield np.concatenate([np.ones((len(block), 1), dtype=np.int64), np.asarray(block, dtype=np.int64)], axis=1)


def feasible_images(inst: Instance) -> np.ndarray:
    """Objective vectors (original sense) of all feasible solutions, skyline-reduced per chunk."""
    if inst.problem == "tsp":
        if inst.n > MAX_TSP_N:
            raise ValueError(f"tsp oracle is limited to n <= {MAX_TSP_N}")
        source = _tours(inst.n)
    else:
        if inst.n > MAX_BINARY_N:
            raise ValueError(f"oracle is limited to n <= {MAX_BINARY_N}")
        source = _binary_vectors(inst.n)
    parts = []
    for xs in source:
        ok, f = evaluate_many(inst, xs)
        if ok.any():
            parts.append(canonical(f[ok], inst.sense))
    if not parts:
        return np.zeros((0, inst.k), dtype=np.int64)
    return np.concatenate(parts)


def brute_force_frontier(inst: Instance) -> np.ndarray:
    return canonical(feasible_images(inst), inst.sense)

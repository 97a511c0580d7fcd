"""Problem instances, their text format, and direct objective evaluation."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

CLASSES = ("knapsack", "setcover", "setpack", "tsp", "mccavp")
SENSE = {"knapsack": "max", "setpack": "max", "setcover": "min", "tsp": "min", "mccavp": "min"}

# keeps every partial path sum comfortably inside int64
_MAGNITUDE_LIMIT = 1 << 60


@dataclass(frozen=True)
class KnapsackData:
    capacity: int
    weights: tuple[int, ...]
    profits: tuple[tuple[int, ...], ...]  # K rows of n profits


@dataclass(frozen=True)
class CoverPackData:
    rows: tuple[tuple[int, ...], ...]  # 0-based column indices per constraint, sorted
    costs: tuple[tuple[int, ...], ...]  # K rows of n costs


@dataclass(frozen=True)
class TspData:
    distances: tuple[tuple[tuple[int, ...], ...], ...]  # K matrices, n x n


@dataclass(frozen=True)
class MccavpData:
    cardinality: int
    coefficients: tuple[tuple[int, ...], ...]  # K rows of n
    targets: tuple[int, ...]  # K


Payload = Union[KnapsackData, CoverPackData, TspData, MccavpData]


def _tuple2(rows) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(int(x) for x in r) for r in rows)


@dataclass(frozen=True)
class Instance:
    problem: str
    n: int
    k: int
    payload: Payload

    @property
    def sense(self) -> str:
        return SENSE[self.problem]

    def __post_init__(self):
        check_instance(self)


def knapsack(weights, profits, capacity) -> Instance:
    profits = _tuple2(profits)
    return Instance("knapsack", len(weights), len(profits), KnapsackData(int(capacity), tuple(map(int, weights)), profits))


def cover_pack(problem: str, n: int, rows, costs) -> Instance:
    """``rows`` hold 0-based column indices."""
    rows = tuple(tuple(sorted(int(c) for c in r)) for r in rows)
    costs = _tuple2(costs)
    return Instance(problem, n, len(costs), CoverPackData(rows, costs))


def tsp(distances) -> Instance:
    mats = tuple(_tuple2(m) for m in distances)
    return Instance("tsp", len(mats[0]), len(mats), TspData(mats))


def mccavp(coefficients, targets, cardinality) -> Instance:
    coefficients = _tuple2(coefficients)
    n = len(coefficients[0]) if coefficients else 0
    return Instance("mccavp", n, len(coefficients), MccavpData(int(cardinality), coefficients, tuple(map(int, targets))))


def check_instance(inst: Instance) -> None:
    """Raise ``ValueError`` when the payload is inconsistent with ``n``/``K``."""
    if inst.problem not in CLASSES:
        raise ValueError(f"unknown problem class {inst.problem!r}")
    if inst.n < 1:
        raise ValueError("n must be positive")
    if inst.k < 1:
        raise ValueError("K must be positive")
    p = inst.payload
    n, k = inst.n, inst.k

    def shape(rows, name, r, c):
        if len(rows) != r or any(len(x) != c for x in rows):
            raise ValueError(f"{name} must be {r} x {c}")

    def bounded(values, name, scale=1):
        if values and max(abs(v) for v in values) * (n + 2) * scale >= _MAGNITUDE_LIMIT:
            raise ValueError(f"{name} too large for exact int64 path sums")

    if inst.problem == "knapsack":
        if not isinstance(p, KnapsackData):
            raise ValueError("knapsack needs KnapsackData")
        shape([p.weights], "weights", 1, n)
        shape(p.profits, "profits", k, n)
        if min(p.weights) < 1 or min(min(r) for r in p.profits) < 1:
            raise ValueError("knapsack weights and profits must be >= 1")
        if p.capacity < 0:
            raise ValueError("capacity must be >= 0")
        bounded(p.weights + (p.capacity,), "weights")
        bounded([x for r in p.profits for x in r], "profits")
    elif inst.problem in ("setcover", "setpack"):
        if not isinstance(p, CoverPackData):
            raise ValueError(f"{inst.problem} needs CoverPackData")
        shape(p.costs, "costs", k, n)
        for i, row in enumerate(p.rows):
            if len(set(row)) != len(row) or any(c < 0 or c >= n for c in row):
                raise ValueError(f"constraint {i + 1} has repeated or out-of-range columns")
            if inst.problem == "setcover" and not row:
                raise ValueError(f"constraint {i + 1} is empty and cannot be covered")
        bounded([x for r in p.costs for x in r], "costs")
    elif inst.problem == "tsp":
        if not isinstance(p, TspData):
            raise ValueError("tsp needs TspData")
        if n < 2:
            raise ValueError("a tour needs at least two cities")
        if len(p.distances) != k:
            raise ValueError("need one distance matrix per objective")
        for m in p.distances:
            shape(m, "distance matrix", n, n)
            a = np.asarray(m, dtype=object)
            if not (a == a.T).all() or any(m[i][i] != 0 for i in range(n)):
                raise ValueError("distance matrices must be symmetric with zero diagonal")
            bounded([x for r in m for x in r], "distances")
    else:
        if not isinstance(p, MccavpData):
            raise ValueError("mccavp needs MccavpData")
        shape(p.coefficients, "coefficients", k, n)
        if len(p.targets) != k:
            raise ValueError("need one target per objective")
        if p.cardinality < 0:
            raise ValueError("cardinality must be >= 0")
        bounded([x for r in p.coefficients for x in r] + list(p.targets), "coefficients", scale=4)


# -- evaluation --------------------------------------------------------------


def evaluate(inst: Instance, x) -> tuple[bool, tuple[int, ...]]:
    """Feasibility and objective vector (original sense) of one solution.

    Binary classes take a 0/1 vector of length n; TSP takes a tour as a
    permutation of ``1..n`` starting at city 1. Computed straight from the
    payload with Python integers.
    """
    x = [int(v) for v in x]
    if len(x) != inst.n:
        raise ValueError(f"solution has length {len(x)}, expected {inst.n}")
    p = inst.payload
    if inst.problem == "tsp":
        feasible = x[0] == 1 and sorted(x) == list(range(1, inst.n + 1))
        if not feasible:
            return False, (0,) * inst.k
        tour = x + [x[0]]
        f = tuple(sum(m[tour[i] - 1][tour[i + 1] - 1] for i in range(inst.n)) for m in p.distances)
        return True, f
    if any(v not in (0, 1) for v in x):
        return False, (0,) * inst.k
    if inst.problem == "knapsack":
        feasible = sum(w * v for w, v in zip(p.weights, x)) <= p.capacity
        f = tuple(sum(c * v for c, v in zip(row, x)) for row in p.profits)
    elif inst.problem in ("setcover", "setpack"):
        counts = [sum(x[c] for c in row) for row in p.rows]
        feasible = all(c >= 1 for c in counts) if inst.problem == "setcover" else all(c <= 1 for c in counts)
        f = tuple(sum(c * v for c, v in zip(row, x)) for row in p.costs)
    else:
        feasible = sum(x) <= p.cardinality
        f = tuple(abs(sum(a * v for a, v in zip(row, x)) - b) for row, b in zip(p.coefficients, p.targets))
    return feasible, f


def evaluate_many(inst: Instance, xs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised :func:`evaluate` over the rows of ``xs``."""
    xs = np.asarray(xs, dtype=np.int64)
    if xs.ndim != 2 or xs.shape[1] != inst.n:
        raise ValueError(f"expected an (m, {inst.n}) array of solutions")
    p = inst.payload
    if inst.problem == "tsp":
        d = np.asarray(p.distances, dtype=np.int64)
        ok = (xs[:, 0] == 1) & np.all(np.sort(xs, axis=1) == np.arange(1, inst.n + 1), axis=1)
        safe = np.where(ok[:, None], xs, np.arange(1, inst.n + 1)) - 1
        nxt = np.roll(safe, -1, axis=1)
        f = d[:, safe, nxt].sum(axis=2).T
        return ok, np.where(ok[:, None], f, 0)
    binary = np.all((xs == 0) | (xs == 1), axis=1)
    if inst.problem == "knapsack":
        ok = binary & (xs @ np.asarray(p.weights, dtype=np.int64) <= p.capacity)
        f = xs @ np.asarray(p.profits, dtype=np.int64).T
    elif inst.problem in ("setcover", "setpack"):
        a = incidence(inst)
        counts = xs @ a.T
        ok = binary & (np.all(counts >= 1, axis=1) if inst.problem == "setcover" else np.all(counts <= 1, axis=1))
        f = xs @ np.asarray(p.costs, dtype=np.int64).T
    else:
        ok = binary & (xs.sum(axis=1) <= p.cardinality)
        f = np.abs(xs @ np.asarray(p.coefficients, dtype=np.int64).T - np.asarray(p.targets, dtype=np.int64))
    return ok, np.where(ok[:, None], f, 0)


def incidence(inst: Instance) -> np.ndarray:
    """Dense 0/1 constraint matrix (m x n) of a cover/pack instance."""
    rows = inst.payload.rows
    a = np.zeros((len(rows), inst.n), dtype=np.int64)
    for i, row in enumerate(rows):
        a[i, list(row)] = 1
    return a


# -- text format -------------------------------------------------------------


def _ints(xs) -> str:
    return " ".join(str(int(x)) for x in xs)


def format_instance(inst: Instance) -> str:
    p = inst.payload
    lines = [f"MODO {inst.problem} n={inst.n} K={inst.k} sense={inst.sense}"]
    if inst.problem == "knapsack":
        lines.append(f"W {p.capacity}")
        lines.append(f"w {_ints(p.weights)}")
        lines.extend(f"p {_ints(r)}" for r in p.profits)
    elif inst.problem in ("setcover", "setpack"):
        lines.append(f"m {len(p.rows)}")
        lines.extend(_ints(c + 1 for c in row) for row in p.rows)
        lines.extend(f"c {_ints(r)}" for r in p.costs)
    elif inst.problem == "tsp":
        for m in p.distances:
            lines.extend(_ints(r) for r in m)
    else:
        lines.append(f"C {p.cardinality}")
        lines.extend(f"a {_ints(r)}" for r in p.coefficients)
        lines.append(f"b {_ints(p.targets)}")
    return "\n".join(lines) + "\n"


def parse_instance(text: str) -> Instance:
    lines = [ln.split() for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0][0] != "MODO" or len(lines[0]) != 5:
        raise ValueError("missing 'MODO <class> n=.. K=.. sense=..' header")
    _, problem, n_tok, k_tok, sense_tok = lines[0]
    if problem not in CLASSES:
        raise ValueError(f"unknown problem class {problem!r}")
    try:
        n = int(n_tok.removeprefix("n="))
        k = int(k_tok.removeprefix("K="))
    except ValueError as exc:
        raise ValueError(f"bad header: {' '.join(lines[0])}") from exc
    if sense_tok != f"sense={SENSE[problem]}":
        raise ValueError(f"{problem} instances are {SENSE[problem]}imization problems")
    body = lines[1:]

    def tagged(line, tag, count=None):
        if not line or line[0] != tag:
            raise ValueError(f"expected a '{tag}' line, got {' '.join(line)!r}")
        vals = [int(t) for t in line[1:]]
        if count is not None and len(vals) != count:
            raise ValueError(f"'{tag}' line should hold {count} values")
        return vals

    def need(count):
        if len(body) != count:
            raise ValueError(f"expected {count} payload lines, found {len(body)}")

    if problem == "knapsack":
        need(2 + k)
        (cap,) = tagged(body[0], "W", 1)
        return knapsack(tagged(body[1], "w", n), [tagged(b, "p", n) for b in body[2:]], cap)
    if problem in ("setcover", "setpack"):
        if not body:
            raise ValueError("missing 'm' line")
        (m,) = tagged(body[0], "m", 1)
        need(1 + m + k)
        rows = [[int(t) - 1 for t in ln] for ln in body[1 : 1 + m]]
        costs = [tagged(b, "c", n) for b in body[1 + m :]]
        if len(costs) != k:
            raise ValueError("cost line count does not match K")
        return cover_pack(problem, n, rows, costs)
    if problem == "tsp":
        need(k * n)
        mats = [[[int(t) for t in ln] for ln in body[i * n : (i + 1) * n]] for i in range(k)]
        return tsp(mats)
    need(2 + k)
    (cap,) = tagged(body[0], "C", 1)
    return mccavp([tagged(b, "a", n) for b in body[1 : 1 + k]], tagged(body[1 + k], "b", k), cap)


def read_instance(path) -> Instance:
    return parse_instance(Path(path).read_text())


def write_instance(inst: Instance, path) -> None:
    Path(path).write_text(format_instance(inst))

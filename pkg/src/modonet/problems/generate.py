"""Seeded random instances.

All randomness comes from :class:`SplitMix64` seeded with the user seed, and
integer ranges use rejection sampling, so an instance is a pure function of
``(class, n, K, seed, params)`` on any platform.
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt

from .instance import CLASSES, Instance, cover_pack, knapsack, mccavp, tsp

_MASK = (1 << 64) - 1


class SplitMix64:
    def __init__(self, seed: int):
        self.state = int(seed) & _MASK

    def next(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def uniform(self, lo: int, hi: int) -> int:
        """Uniform integer in ``[lo, hi]`` without modulo bias."""
        if hi < lo:
            raise ValueError("empty range")
        span = hi - lo + 1
        limit = (1 << 64) - (1 << 64) % span
        while True:
            r = self.next()
            if r < limit:
                return lo + r % span

    def sample(self, population: int, count: int) -> list[int]:
        """``count`` distinct values of ``range(population)`` (partial Fisher-Yates)."""
        pool = list(range(population))
        for i in range(count):
            j = self.uniform(i, population - 1)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:count]


def rounded_distance(dx: int, dy: int) -> int:
    """Euclidean length rounded to the nearest integer, in exact arithmetic."""
    sq = dx * dx + dy * dy
    r = isqrt(sq)
    # round up iff sqrt(sq) >= r + 1/2, i.e. sq - r^2 > r (sq is an integer)
    return r + 1 if sq - r * r > r else r


def half_capacity(weights) -> int:
    """Knapsack capacity ``ceil(sum(w) / 2)``."""
    return (sum(weights) + 1) // 2


def gen_knapsack(rng: SplitMix64, n: int, k: int) -> Instance:
    w = [rng.uniform(1, 1000) for _ in range(n)]
    p = [[rng.uniform(1, 1000) for _ in range(n)] for _ in range(k)]
    return knapsack(w, p, half_capacity(w))


def gen_cover_pack(rng: SplitMix64, problem: str, n: int, k: int, rows: int | None = None, row_size: int | None = None) -> Instance:
    m = max(1, n // 5) if rows is None else rows
    size = min(10, n) if row_size is None else row_size
    if m < 1 or not 1 <= size <= n:
        raise ValueError(f"need rows >= 1 and 1 <= row_size <= n, got rows={m}, row_size={size}")
    matrix = [sorted(rng.sample(n, size)) for _ in range(m)]
    costs = [[rng.uniform(1, 1000) for _ in range(n)] for _ in range(k)]
    return cover_pack(problem, n, matrix, costs)


def gen_tsp(rng: SplitMix64, n: int, k: int) -> Instance:
    mats = []
    for _ in range(k):
        pts = [(rng.uniform(0, 1000), rng.uniform(0, 1000)) for _ in range(n)]
        mats.append([[rounded_distance(a[0] - b[0], a[1] - b[1]) for b in pts] for a in pts])
    return tsp(mats)


def gen_mccavp(rng: SplitMix64, n: int, k: int, M: int = 50, delta=0.5) -> Instance:
    if M < 0:
        raise ValueError("M must be non-negative")
    frac = Fraction(str(delta))
    if not 0 <= frac <= 1:
        raise ValueError("delta must lie in [0, 1]")
    a = [[rng.uniform(-M, M) for _ in range(n)] for _ in range(k)]
    b = [sum(row) // 2 for row in a]
    return mccavp(a, b, int(n * frac))


def generate(problem: str, n: int, k: int, seed: int, **params) -> Instance:
    """Random instance of ``problem``.

    Extra parameters: ``rows`` and ``row_size`` for setcover/setpack (defaults
    ``max(1, n // 5)`` and ``min(10, n)``); ``M`` and ``delta`` for mccavp
    (defaults 50 and 0.5).
    """
    if problem not in CLASSES:
        raise ValueError(f"unknown problem class {problem!r}")
    if n < 1 or k < 1:
        raise ValueError("n and K must be positive")
    allowed = {"setcover": {"rows", "row_size"}, "setpack": {"rows", "row_size"}, "mccavp": {"M", "delta"}}.get(problem, set())
    params = {key: val for key, val in params.items() if val is not None}
    extra = set(params) - allowed
    if extra:
        raise ValueError(f"{problem} does not take parameter(s) {sorted(extra)}")
    rng = SplitMix64(seed)
    if problem == "knapsack":
        return gen_knapsack(rng, n, k)
    if problem in ("setcover", "setpack"):
        return gen_cover_pack(rng, problem, n, k, **params)
    if problem == "tsp":
        if n < 2:
            raise ValueError("a tour needs at least two cities")
        return gen_tsp(rng, n, k)
    return gen_mccavp(rng, n, k, **params)

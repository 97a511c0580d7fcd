"""Objective vectors, dominance and nondominated (skyline) filtering.

Objective vectors are int64 numpy rows. A set of vectors is an ``(m, K)``
array. Everything here works in the canonical *maximize* sense: ``y``
dominates ``y2`` when it is at least as large in every component and
strictly larger in one.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np

INT64_MIN = np.iinfo(np.int64).min
INT64_MAX = np.iinfo(np.int64).max

# upper bound on the number of booleans materialised by one pairwise comparison
_PAIR_BUDGET = 1 << 22


def as_vector(values: Iterable[int]) -> np.ndarray:
    v = np.asarray(list(values) if not isinstance(values, np.ndarray) else values)
    if v.ndim != 1:
        raise ValueError("objective vector must be one-dimensional")
    return _to_int64(v)


def as_points(points, k: int | None = None) -> np.ndarray:
    """Coerce an iterable of vectors into an ``(m, K)`` int64 array."""
    if isinstance(points, np.ndarray):
        arr = points
    else:
        arr = list(points)
        if not arr:
            return np.zeros((0, k or 0), dtype=np.int64)
        arr = np.asarray([list(p) for p in arr])
    if arr.ndim == 1:
        if arr.size == 0:
            return np.zeros((0, k or 0), dtype=np.int64)
        raise ValueError("expected a two-dimensional set of vectors")
    if k is not None and arr.shape[1] != k and arr.shape[0] > 0:
        raise ValueError(f"expected vectors of length {k}, got {arr.shape[1]}")
    return _to_int64(arr)


def _to_int64(arr: np.ndarray) -> np.ndarray:
    if arr.dtype == np.int64:
        return arr
    if arr.dtype == object or arr.dtype.kind in "iub":
        if arr.dtype == object:
            if arr.size and (max(arr.flat) > INT64_MAX or min(arr.flat) < INT64_MIN):
                raise OverflowError("objective value does not fit in int64")
        return arr.astype(np.int64)
    raise TypeError(f"objective vectors must be integral, got dtype {arr.dtype}")


def checked_add(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """int64 addition that raises ``OverflowError`` instead of wrapping."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    with np.errstate(over="ignore"):
        r = a + b
    if np.any(((a ^ r) & (b ^ r)) < 0):
        raise OverflowError("int64 overflow in objective vector addition")
    return r


def checked_sub(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return checked_add(a, checked_neg(b))


def checked_neg(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=np.int64)
    if np.any(a == INT64_MIN):
        raise OverflowError("int64 overflow in objective vector negation")
    return -a


def dominates(y, y2) -> bool:
    """True iff ``y`` is componentwise >= ``y2`` and strictly greater somewhere."""
    a = as_vector(y)
    b = as_vector(y2)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape[0]} vs {b.shape[0]}")
    return bool(np.all(a >= b) and np.any(a > b))


def weakly_dominates(y, y2) -> bool:
    a = as_vector(y)
    b = as_vector(y2)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape[0]} vs {b.shape[0]}")
    return bool(np.all(a >= b))


def lex_order(points: np.ndarray) -> np.ndarray:
    """Indices sorting rows lexicographically ascending."""
    if points.shape[0] == 0:
        return np.zeros(0, dtype=np.int64)
    return np.lexsort(points.T[::-1])


def lex_sorted(points: np.ndarray) -> np.ndarray:
    return points[lex_order(points)]


def _unique_desc(points: np.ndarray) -> np.ndarray:
    order = lex_order(points)[::-1]
    p = points[order]
    if len(p) > 1:
        fresh = np.ones(len(p), dtype=bool)
        fresh[1:] = np.any(p[1:] != p[:-1], axis=1)
        p = p[fresh]
    return p


def _ge_table(rows: np.ndarray, queries: np.ndarray) -> np.ndarray:
    """``t[i, j]`` iff ``rows[j] >= queries[i]`` componentwise."""
    t = rows[None, :, 0] >= queries[:, None, 0]
    for c in range(1, rows.shape[1]):
        t &= rows[None, :, c] >= queries[:, None, c]
    return t


def _covered(front: np.ndarray, queries: np.ndarray) -> np.ndarray:
    """``out[i]`` iff some row of ``front`` is componentwise >= ``queries[i]``."""
    out = np.zeros(len(queries), dtype=bool)
    if len(front) == 0 or len(queries) == 0:
        return out
    k = queries.shape[1]
    step = max(1, _PAIR_BUDGET // max(1, len(queries) * k))
    for s in range(0, len(front), step):
        blk = front[s : s + step]
        out |= _ge_table(blk, queries).any(axis=1)
    return out


def _nd_mask_desc(p: np.ndarray) -> np.ndarray:
    """Keep-mask for distinct rows already sorted lexicographically descending.

    In that order a row can only be dominated by rows that precede it.
    """
    m, k = p.shape
    keep = np.ones(m, dtype=bool)
    if m <= 1:
        return keep
    if k == 1:
        keep[1:] = False
        return keep
    if k == 2:
        best = np.maximum.accumulate(p[:, 1])
        keep[1:] = p[1:, 1] > best[:-1]
        return keep
    front = np.zeros((0, k), dtype=np.int64)
    start = 0
    while start < m:
        block = max(16, min(1024, _PAIR_BUDGET // max(1, (len(front) + 1024) * k)))
        q = p[start : start + block]
        dom = _covered(front, q)
        idx = np.flatnonzero(~dom)
        r = q[idx]
        ge = _ge_table(r, r)
        dom[idx[np.tril(ge, -1).any(axis=1)]] = True
        keep[start : start + len(q)] = ~dom
        front = np.concatenate([front, q[~dom]])
        start += len(q)
    return keep


def nd_filter(points) -> np.ndarray:
    """Nondominated subset of a set of vectors.

    Duplicates collapse to one copy; the result is sorted lexicographically
    ascending, which is the canonical form used for comparison and output.
    """
    p = as_points(points)
    if p.shape[0] == 0:
        return p
    p = _unique_desc(p)
    return p[_nd_mask_desc(p)][::-1].copy()


def nd_filter_reference(points) -> np.ndarray:
    """Quadratic all-pairs filter, kept as a test oracle for :func:`nd_filter`."""
    p = as_points(points)
    if p.shape[0] == 0:
        return p
    p = np.unique(p, axis=0)
    kept = []
    for i in range(len(p)):
        if not any(np.all(p[j] >= p[i]) and np.any(p[j] > p[i]) for j in range(len(p)) if j != i):
            kept.append(p[i])
    return lex_sorted(np.asarray(kept, dtype=np.int64).reshape(-1, p.shape[1]))


def _group_desc_order(points: np.ndarray, groups: np.ndarray) -> np.ndarray:
    """Order by group ascending, then rows lexicographically descending."""
    order = np.lexsort(tuple(points.T[::-1]) + (groups,))
    g = groups[order]
    newg = np.ones(len(g), dtype=bool)
    newg[1:] = g[1:] != g[:-1]
    starts = np.flatnonzero(newg)
    sizes = np.diff(np.append(starts, len(g)))
    s = np.repeat(starts, sizes)
    e = s + np.repeat(sizes, sizes)
    i = np.arange(len(g))
    return order[s + e - 1 - i]


def nd_grouped(points: np.ndarray, groups: np.ndarray) -> np.ndarray:
    """Per-group skyline.

    Returns the indices of the rows that survive ``nd_filter`` within their
    group (one representative per duplicate), ordered by group ascending and
    then lexicographically descending.
    """
    n = len(points)
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    order = _group_desc_order(points, groups)
    p = points[order]
    g = groups[order]
    if n > 1:
        fresh = np.ones(n, dtype=bool)
        fresh[1:] = (g[1:] != g[:-1]) | np.any(p[1:] != p[:-1], axis=1)
        order, p, g = order[fresh], p[fresh], g[fresh]
    m, k = p.shape
    newg = np.ones(m, dtype=bool)
    newg[1:] = g[1:] != g[:-1]
    starts = np.flatnonzero(newg)
    sizes = np.diff(np.append(starts, m))
    if sizes.max() == 1:
        return order
    pos = np.arange(m) - np.repeat(starts, sizes)
    dominated = np.zeros(m, dtype=bool)
    big = sizes > 256
    rows = np.flatnonzero(np.repeat(~big, sizes) & (pos > 0))
    if len(rows):
        cnt = pos[rows]
        first = rows - cnt
        csum = np.cumsum(cnt)
        chunk = max(1, _PAIR_BUDGET // k)
        cols = [np.ascontiguousarray(p[:, c]) for c in range(k)]
        lo = 0
        while lo < len(rows):
            base = csum[lo - 1] if lo else 0
            hi = int(np.searchsorted(csum, base + chunk, side="right"))
            hi = max(hi, lo + 1)
            c = cnt[lo:hi]
            total = int(c.sum())
            rep_i = np.repeat(rows[lo:hi], c)
            off = np.arange(total) - np.repeat(np.cumsum(c) - c, c)
            j = np.repeat(first[lo:hi], c) + off
            ge = cols[0][j] >= cols[0][rep_i]
            for col in cols[1:]:
                ge &= col[j] >= col[rep_i]
            dominated[rep_i[ge]] = True
            lo = hi
    for gi in np.flatnonzero(big):
        s = starts[gi]
        e = s + sizes[gi]
        dominated[s:e] = ~_nd_mask_desc(p[s:e])
    return order[~dominated]


def covered_by_earlier(points: np.ndarray, eligible: np.ndarray) -> np.ndarray:
    """``out[i]`` iff some eligible ``j < i`` has ``points[j] >= points[i]``.

    Used for cross-node label filtering, where processing order encodes the
    state-dominance order. Weak dominance is transitive, so an archive of the
    nondominated eligible rows seen so far suffices.
    """
    n = len(points)
    out = np.zeros(n, dtype=bool)
    if n == 0:
        return out
    k = points.shape[1]
    archive = np.zeros((0, k), dtype=np.int64)
    start = 0
    while start < n:
        block = max(16, min(1024, _PAIR_BUDGET // max(1, (len(archive) + 1024) * k)))
        q = points[start : start + block]
        el = eligible[start : start + block]
        dom = _covered(archive, q)
        ge = _ge_table(q, q)
        ge &= el[None, :]
        dom |= np.tril(ge, -1).any(axis=1)
        out[start : start + len(q)] = dom
        fresh = q[el & ~dom]
        if len(fresh):
            archive = nd_filter(np.concatenate([archive, fresh]))
        start += len(q)
    return out


def couple_sets(z1, z2) -> np.ndarray:
    """Nondominated set of all pairwise sums ``a + b`` with ``a`` in z1, ``b`` in z2."""
    a = as_points(z1)
    b = as_points(z2)
    if len(a) == 0 or len(b) == 0:
        k = a.shape[1] if a.shape[1] else b.shape[1]
        return np.zeros((0, k), dtype=np.int64)
    if a.shape[1] != b.shape[1]:
        raise ValueError("coupled sets must have equal dimension")
    parts = []
    step = max(1, _PAIR_BUDGET // (len(b) * a.shape[1]))
    for s in range(0, len(a), step):
        sums = checked_add(a[s : s + step, None, :], b[None, :, :]).reshape(-1, a.shape[1])
        parts.append(nd_filter(sums))
    return nd_filter(np.concatenate(parts))


def format_frontier(points, k: int) -> str:
    """Frontier file text: ``K <k> <count>`` then one sorted point per line."""
    p = lex_sorted(as_points(points, k)) if len(points) else np.zeros((0, k), dtype=np.int64)
    lines = [f"K {k} {len(p)}"]
    lines.extend(" ".join(str(int(x)) for x in row) for row in p)
    return "\n".join(lines) + "\n"


def parse_frontier(text: str) -> np.ndarray:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty frontier file")
    head = lines[0].split()
    if len(head) != 3 or head[0] != "K":
        raise ValueError(f"bad frontier header: {lines[0]!r}")
    k, count = int(head[1]), int(head[2])
    rows = [[int(t) for t in ln.split()] for ln in lines[1:]]
    if len(rows) != count or any(len(r) != k for r in rows):
        raise ValueError("frontier body does not match its header")
    return np.asarray(rows, dtype=np.int64).reshape(count, k)


def to_tuples(points) -> list[tuple[int, ...]]:
    return [tuple(int(x) for x in row) for row in as_points(points)]

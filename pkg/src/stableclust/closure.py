"""Closure distance and closure linkage for center-stable k-median instances.

Two linkage routes build the same hierarchy:

* :func:`closure_linkage_tree` evaluates the closure distance of every pair of
  current clusters and merges the closest pair, one pair at a time.
* :func:`closure_linkage_tree_fast` scans pairwise distances in ascending order
  and accepts a ball ``B(p, d(p, q))`` as soon as it covers every cluster it
  touches, touches at least two, and passes the margin test read off the
  precomputed :class:`NeighborTables`.  All covered clusters merge at once.

Indices in :class:`NeighborTables` are zero-based: ``L[p, 0] == p``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .core import ClusterTree, TreeBuilder, as_matrix
from .errors import InputError


def ball(D, c: int, r: float) -> np.ndarray:
    """Indices of the closed ball of radius ``r`` around ``c``."""
    return np.flatnonzero(as_matrix(D).d[c] <= r)


def ball_margin_check(D, c: int, r: float) -> bool:
    """True iff every point inside ``B(c, r)`` is strictly closer to ``c`` than
    to any point outside the ball."""
    d = as_matrix(D).d
    inside = d[c] <= r
    if inside.all():
        return True
    ins = np.flatnonzero(inside)
    out = np.flatnonzero(~inside)
    return bool(np.all(d[c, ins][:, None] < d[np.ix_(ins, out)]))


@dataclass(frozen=True)
class ClosureDistanceResult:
    value: float
    center: int
    members: tuple  # the ball B(center, value)


class _ClosureOracle:
    """Caches, per candidate center, which radii pass the margin test."""

    def __init__(self, D):
        self.D = as_matrix(D)
        self._radii: dict[int, np.ndarray] = {}
        self._next_ok: dict[int, np.ndarray] = {}

    def _tables(self, c: int):
        if c not in self._radii:
            radii = np.unique(self.D.d[c])
            ok = np.array([ball_margin_check(self.D, c, r) for r in radii])
            # next_ok[i] = smallest index >= i whose radius passes; the full ball always does
            idx = np.where(ok, np.arange(len(radii)), len(radii))
            next_ok = np.minimum.accumulate(idx[::-1])[::-1]
            self._radii[c], self._next_ok[c] = radii, next_ok
        return self._radii[c], self._next_ok[c]

    def smallest_radius(self, c: int, cover: float) -> float:
        radii, next_ok = self._tables(c)
        i = int(np.searchsorted(radii, cover, side="left"))
        return float(radii[next_ok[i]])

    def distance(self, A, B) -> tuple[float, int]:
        union = np.concatenate([A, B])
        order = np.sort(union)
        cover = self.D.d[np.ix_(order, union)].max(axis=1)
        best = (np.inf, -1)
        for c, r in zip(order, cover):
            v = self.smallest_radius(int(c), float(r))
            if v < best[0]:
                best = (v, int(c))
        return best


def _as_index_set(D, A: Iterable[int], name: str) -> np.ndarray:
    arr = np.unique(np.asarray(list(A), dtype=np.intp))
    if arr.size == 0:
        raise InputError(f"{name} is empty")
    if arr[0] < 0 or arr[-1] >= D.n:
        raise InputError(f"{name} has indices outside 0..{D.n - 1}")
    return arr


def closure_distance(D, A: Iterable[int], A2: Iterable[int]) -> ClosureDistanceResult:
    """Smallest radius of a ball centred in ``A ∪ A2`` that covers both sets and
    whose members are strictly closer to the center than to any outside point.

    Ties between centers go to the smallest index.
    """
    D = as_matrix(D)
    A = _as_index_set(D, A, "A")
    A2 = _as_index_set(D, A2, "A2")
    if np.intersect1d(A, A2).size:
        raise InputError("closure distance needs disjoint sets")
    value, center = _ClosureOracle(D).distance(A, A2)
    return ClosureDistanceResult(value, center, tuple(ball(D, center, value).tolist()))


def closure_linkage_tree(D) -> ClusterTree:
    """Merge the pair of clusters with the smallest closure distance until one
    cluster remains.

    Ties are broken by ``(value, smaller cluster id, larger cluster id)``;
    points are clusters ``0..n-1`` and each merge creates the next id.
    """
    D = as_matrix(D)
    oracle = _ClosureOracle(D)
    builder = TreeBuilder([i] for i in range(D.n))
    members = {i: np.array([i]) for i in range(D.n)}
    pairs: dict[tuple[int, int], float] = {}
    for i in range(D.n):
        for j in range(i + 1, D.n):
            pairs[(i, j)] = oracle.distance(members[i], members[j])[0]
    while len(members) > 1:
        (i, j), value = min(pairs.items(), key=lambda kv: (kv[1], kv[0]))
        new = builder.merge([i, j], value)
        members[new] = np.concatenate([members.pop(i), members.pop(j)])
        pairs = {key: v for key, v in pairs.items() if i not in key and j not in key}
        for other in members:
            if other != new:
                pairs[(other, new)] = oracle.distance(members[other], members[new])[0]
    return builder.finish()


@dataclass(frozen=True)
class NeighborTables:
    """Per-point neighbor orders and margin-violation indices (zero-based).

    ``L[p]`` lists all points by increasing distance from ``p`` (``p`` first,
    ties by index).  ``chi[p, i]`` is the largest ``j > i`` with
    ``d(p, L[p,i]) >= d(L[p,i], L[p,j])``, or -1; ``chi_star`` is its running
    maximum over ``i``.  ``pos[p, q]`` is the rank of ``q`` in ``L[p]`` and
    ``last[p, i]`` the largest rank at the same distance from ``p`` as rank ``i``.
    """

    L: np.ndarray
    chi: np.ndarray
    chi_star: np.ndarray
    pos: np.ndarray
    last: np.ndarray

    def margin_ok(self, p: int, i: int) -> bool:
        """Margin test for the ball around ``p`` reaching rank ``i``."""
        e = self.last[p, i]
        return bool(self.chi_star[p, e] <= e)


def neighbor_order(D):
    """Return ``(L, pos, last)``: neighbor ranks of every point (see NeighborTables)."""
    d = as_matrix(D).d
    n = d.shape[0]
    idx = np.arange(n)
    L = np.empty((n, n), dtype=np.intp)
    pos = np.empty((n, n), dtype=np.intp)
    last = np.empty((n, n), dtype=np.intp)
    for p in range(n):
        order = np.lexsort((idx, idx != p, d[p]))
        L[p] = order
        pos[p, order] = idx
        dp = d[p, order]
        brk = np.append(dp[1:] != dp[:-1], True)
        last[p] = np.minimum.accumulate(np.where(brk, idx, n)[::-1])[::-1]
    return L, pos, last


def build_neighbor_tables(D) -> NeighborTables:
    d = as_matrix(D).d
    n = d.shape[0]
    L, pos, last = neighbor_order(D)
    chi = np.full((n, n), -1, dtype=np.intp)
    upper = np.triu(np.ones((n, n), dtype=bool), 1)
    for p in range(n):
        order = L[p]
        dp = d[p, order]
        hit = (d[np.ix_(order, order)] <= dp[:, None]) & upper
        rev = hit[:, ::-1]
        chi[p] = np.where(rev.any(axis=1), n - 1 - rev.argmax(axis=1), -1)
    chi_star = np.maximum.accumulate(chi, axis=1)
    return NeighborTables(L, chi, chi_star, pos, last)


def sorted_ordered_pairs(d: np.ndarray):
    """All ordered pairs ``(p, q)``, ``p != q``, ascending by distance, then
    ``(min(p, q), max(p, q), p)``."""
    n = d.shape[0]
    p, q = np.nonzero(~np.eye(n, dtype=bool))
    vals = d[p, q]
    order = np.lexsort((p, np.maximum(p, q), np.minimum(p, q), vals))
    return p[order], q[order], vals[order]


def closure_linkage_tree_fast(D, tables: NeighborTables | None = None) -> ClusterTree:
    """Closure linkage driven by a single ascending scan of pairwise distances.

    Runs in ``O(n^3)``: the neighbor tables cost ``O(n^3)`` to build and each
    scanned ball is rejected in ``O(1)`` unless its margin test passes.
    Balls at equal distance are rescanned until none is accepted, so merges
    enabled by an earlier merge at the same height are not missed.
    """
    D = as_matrix(D)
    d = D.d
    n = D.n
    if tables is None:
        tables = build_neighbor_tables(D)
    builder = TreeBuilder([i] for i in range(n))
    label = np.arange(n)
    size = np.ones(2 * n, dtype=np.intp)
    ps, qs, vals = sorted_ordered_pairs(d)
    start = 0
    remaining = n
    while start < len(vals) and remaining > 1:
        stop = start
        while stop < len(vals) and vals[stop] == vals[start]:
            stop += 1
        changed = True
        while changed and remaining > 1:
            changed = False
            for t in range(start, stop):
                p, q = int(ps[t]), int(qs[t])
                e = int(tables.last[p, tables.pos[p, q]])
                if size[label[p]] >= e + 1:
                    continue  # the ball sees at most p's own cluster
                if tables.chi_star[p, e] > e:
                    continue
                inside = tables.L[p, : e + 1]
                hit = np.unique(label[inside])
                if size[hit].sum() != e + 1:
                    continue  # some touched cluster sticks out of the ball
                new = builder.merge(hit.tolist(), vals[t])
                label[inside] = new
                size[new] = e + 1
                remaining -= len(hit) - 1
                changed = True
        start = stop
    return builder.finish()

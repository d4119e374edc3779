"""Stability, bad-point and structural checks against a planted clustering."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import Clustering, as_matrix
from ..errors import InputError


def _centers(C: Clustering) -> np.ndarray:
    if C.centers is None:
        raise InputError("this check needs a clustering with centers")
    return np.asarray(C.centers, dtype=np.intp)


@dataclass(frozen=True)
class StabilityCheck:
    ok: bool
    violation: tuple | None = None  # (point, own block, other block)

    def __bool__(self) -> bool:
        return self.ok


def check_center_stability(D, C: Clustering, alpha: float) -> StabilityCheck:
    """Every point must be more than ``alpha`` times closer to its own center
    than to any other center (strict)."""
    d = as_matrix(D).d
    centers = _centers(C)
    for i, block in enumerate(C.blocks):
        b = list(block)
        own = alpha * d[b, centers[i]]
        for j in range(C.k):
            if j == i:
                continue
            bad = np.flatnonzero(~(own < d[b, centers[j]]))
            if bad.size:
                return StabilityCheck(False, (b[bad[0]], i, j))
    return StabilityCheck(True)


def stability_factor(D, C: Clustering) -> float:
    """Supremum of ``alpha`` for which ``C`` is center stable (``inf`` for k = 1)."""
    d = as_matrix(D).d
    centers = _centers(C)
    best = np.inf
    for i, block in enumerate(C.blocks):
        b = [x for x in block if x != centers[i]]
        if not b or C.k == 1:
            continue
        others = np.delete(centers, i)
        ratio = d[np.ix_(b, others)].min(axis=1) / d[b, centers[i]]
        best = min(best, float(ratio.min()))
    return best


@dataclass(frozen=True)
class BadPoints:
    points: tuple
    per_cluster: tuple

    def __len__(self) -> int:
        return len(self.points)


def identify_bad_points(D, C: Clustering, alpha: float) -> BadPoints:
    """Points ``p`` in block ``i`` with ``alpha * d(c_i, p) > d(c_j, p)`` for some ``j != i``."""
    d = as_matrix(D).d
    centers = _centers(C)
    per = []
    for i, block in enumerate(C.blocks):
        b = np.asarray(block)
        others = np.delete(centers, i)
        if others.size == 0:
            per.append(())
            continue
        nearest_other = d[np.ix_(b, others)].min(axis=1)
        per.append(tuple(b[alpha * d[b, centers[i]] > nearest_other].tolist()))
    return BadPoints(tuple(sorted(x for p in per for x in p)), tuple(per))


def bad_point_threshold(alpha: float, epsilon: float, n: int) -> float:
    """Smallest-cluster size above which the bad-point bound ``|B| <= epsilon n``
    is guaranteed for (alpha, epsilon)-resilient instances."""
    return (2 + 2 * alpha / (alpha - 1)) * epsilon * n + 2 * alpha * (alpha + 1) / (alpha - 1)


def center_order_violations(D, C: Clustering) -> list[tuple]:
    """Pairs ``p in C_i``, ``q in C_j`` breaking ``d(c_i, q) > d(c_i, p)`` (kind 1)
    or ``d(p, c_i) < d(p, q)`` (kind 2)."""
    d = as_matrix(D).d
    centers = _centers(C)
    labels = C.labels()
    out = []
    for i, block in enumerate(C.blocks):
        b = np.asarray(block)
        rest = np.flatnonzero(labels != i)
        if rest.size == 0:
            continue
        c = centers[i]
        one = ~(d[c, rest][None, :] > d[c, b][:, None])
        two = ~(d[b, c][:, None] < d[np.ix_(b, rest)])
        for kind, bad in ((1, one), (2, two)):
            for a, r in np.argwhere(bad):
                out.append((int(b[a]), int(rest[r]), kind))
    return out


def laminar(nodes, C: Clustering, ignore=()) -> bool:
    """Every node is inside one block, contains whole blocks only, or is empty,
    after removing the points in ``ignore`` from everything."""
    ig = set(ignore)
    blocks = [frozenset(b) - ig for b in C.blocks]
    for node in nodes:
        s = frozenset(node) - ig
        if not s:
            continue
        if any(s <= b for b in blocks):
            continue
        if all(b <= s or not (b & s) for b in blocks):
            continue
        return False
    return True


def subset_ratio_violations(D, C: Clustering, alpha: float, rng, samples: int = 20) -> list[tuple]:
    """Sample subsets ``A`` of each block and report those with
    ``alpha * d_sum(A, C_i - A) >= d_sum(A, C_j)``."""
    d = as_matrix(D).d
    out = []
    for i, block in enumerate(C.blocks):
        b = np.asarray(block)
        if len(b) < 2:
            continue
        for _ in range(samples):
            size = int(rng.integers(1, len(b)))
            A = rng.choice(b, size=size, replace=False)
            rest = np.setdiff1d(b, A)
            inside = d[np.ix_(A, rest)].sum()
            for j, other in enumerate(C.blocks):
                if j != i and not alpha * inside < d[np.ix_(A, list(other))].sum():
                    out.append((i, j, tuple(sorted(A.tolist()))))
    return out


def neighbor_violations(D, C: Clustering) -> list[int]:
    """Points whose ``floor(min_i |C_i| / 2)`` nearest other points are not all
    in their own block."""
    d = as_matrix(D).d
    t = min(len(b) for b in C.blocks) // 2
    labels = C.labels()
    idx = np.arange(len(labels))
    out = []
    for p in idx:
        order = np.lexsort((idx, d[p]))
        nbrs = order[order != p][:t]
        if np.any(labels[nbrs] != labels[p]):
            out.append(int(p))
    return out

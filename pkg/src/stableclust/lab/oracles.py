"""Exhaustive oracles: optimal clusterings and all prunings of a tree."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from ..core import Clustering, ClusterTree, as_matrix, assign_to_centers
from ..errors import InputError, ScaleError

KMEDIAN_GUARD = 10**7
MINSUM_MAX_N = 12
PRUNING_GUARD = 10**6

# relative slack when deciding whether two optimal costs tie
_TIE_RTOL = 1e-9


@dataclass(frozen=True)
class OracleResult:
    clustering: Clustering
    cost: float
    unique: bool


def _check_k(n: int, k: int) -> None:
    if not 1 <= k <= n:
        raise InputError(f"k must lie in [1, {n}], got {k}")


def brute_force_kmedian(D, k: int, guard: int = KMEDIAN_GUARD) -> OracleResult:
    """Try every set of ``k`` centers; points go to the nearest center, ties
    to the smaller index.  ``unique`` tells whether every optimal center set
    induces the same partition."""
    D = as_matrix(D)
    n = D.n
    _check_k(n, k)
    total = math.comb(n, k)
    if total > guard:
        raise ScaleError(f"C({n},{k}) = {total} center sets exceeds the guard {guard}")
    d = D.d
    chunk = max(1, 2_000_000 // max(1, n * k))
    best, ties = np.inf, []
    combos = itertools.combinations(range(n), k)
    while True:
        block = np.array(list(itertools.islice(combos, chunk)), dtype=np.intp)
        if block.size == 0:
            break
        costs = d[:, block].min(axis=2).sum(axis=0)
        best = min(best, float(costs.min()))
        ties.extend(block[costs <= best * (1 + _TIE_RTOL)].tolist())
    ties = [t for t in ties if _cost_of(d, t) <= best * (1 + _TIE_RTOL)]
    first = assign_to_centers(D, ties[0])
    unique = all(assign_to_centers(D, t).same_partition(first) for t in ties[1:])
    return OracleResult(first.canonical(), float(_cost_of(d, ties[0])), unique)


def _cost_of(d: np.ndarray, centers) -> float:
    return float(d[:, list(centers)].min(axis=1).sum())


def restricted_growth_strings(n: int, k: int) -> np.ndarray:
    """All labelings of ``n`` points into exactly ``k`` blocks, one row each,
    in canonical form (first occurrences of labels appear in order 0, 1, ...)."""
    _check_k(n, k)
    rows = np.zeros((1, 1), dtype=np.int8)
    top = np.zeros(1, dtype=np.int8)  # highest label used so far
    for i in range(1, n):
        parts, tops = [], []
        for v in range(k):
            ok = v <= top + 1
            # enough positions left to still open every missing block
            ok &= np.maximum(top, v) + 1 + (n - i - 1) >= k
            if ok.any():
                sel = rows[ok]
                parts.append(np.hstack([sel, np.full((len(sel), 1), v, dtype=np.int8)]))
                tops.append(np.maximum(top[ok], v))
        rows = np.vstack(parts)
        top = np.concatenate(tops).astype(np.int8)
    return rows[top == k - 1]


def brute_force_minsum(D, k: int, max_n: int = MINSUM_MAX_N) -> OracleResult:
    """Enumerate every partition into exactly ``k`` blocks and return one with
    the smallest ordered-pair min-sum cost."""
    D = as_matrix(D)
    n = D.n
    _check_k(n, k)
    if n > max_n:
        raise ScaleError(f"partition enumeration limited to n <= {max_n}, got {n}")
    d = D.d
    labels = restricted_growth_strings(n, k)
    costs = np.empty(len(labels))
    chunk = 20000
    for s in range(0, len(labels), chunk):
        lab = labels[s : s + chunk]
        same = lab[:, :, None] == lab[:, None, :]
        costs[s : s + chunk] = (same * d).sum(axis=(1, 2))
    j = int(np.argmin(costs))
    best = float(costs[j])
    n_ties = int((costs <= best + _TIE_RTOL * max(1.0, abs(best))).sum())
    C = Clustering.from_labels(labels[j]).canonical()
    return OracleResult(C, best, n_ties == 1)


def _count_prunings(T: ClusterTree, k: int) -> dict:
    counts: dict[int, list[int]] = {}
    for i in T.postorder():
        node = T.nodes[i]
        c = [0] * (k + 1)
        c[1] = 1
        if node.children:
            acc = [1] + [0] * k  # ways for the children seen so far, indexed by total
            for ch in node.children:
                nxt = [0] * (k + 1)
                for a in range(k + 1):
                    if acc[a]:
                        for b in range(1, k + 1 - a):
                            nxt[a + b] += acc[a] * counts[ch][b]
                acc = nxt
            for m in range(2, k + 1):
                c[m] += acc[m]
        counts[i] = c
    return counts


def count_prunings(T: ClusterTree, k: int) -> int:
    return _count_prunings(T, k)[T.root][k]


def enumerate_prunings(T: ClusterTree, k: int, guard: int = PRUNING_GUARD) -> list[Clustering]:
    """All sets of tree nodes whose member sets partition the points into
    exactly ``k`` blocks.  Works on multiway trees."""
    if k < 1:
        raise InputError(f"k must be >= 1, got {k}")
    total = count_prunings(T, k)
    if total > guard:
        raise ScaleError(f"{total} prunings exceed the guard {guard}")

    def prunings(i: int, m: int) -> list[list[int]]:
        node = T.nodes[i]
        if m == 1:
            return [[i]]
        if not node.children:
            return []
        out = []
        kids = node.children
        for split in _compositions(m, len(kids)):
            parts = [prunings(c, s) for c, s in zip(kids, split)]
            for combo in itertools.product(*parts):
                out.append([x for part in combo for x in part])
        return out

    result = []
    for ids in prunings(T.root, k):
        result.append(Clustering(tuple(T.nodes[i].members for i in ids)).canonical())
    return result


def _compositions(m: int, parts: int):
    """Ways to write ``m`` as an ordered sum of ``parts`` positive integers."""
    for cuts in itertools.combinations(range(1, m), parts - 1):
        bounds = (0,) + cuts + (m,)
        yield tuple(bounds[i + 1] - bounds[i] for i in range(parts))

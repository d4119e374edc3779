"""Approximate closure linkage and tree cleaning for k-median instances that
are resilient up to a small fraction of misplaced points.

The point budget ``floor(epsilon * n)`` bounds three things at once: the
points of a candidate cluster that may lie outside the ball, the points of
all candidates together outside the ball, and the outside points allowed to
violate the margin.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .closure import neighbor_order, sorted_ordered_pairs
from .core import Clustering, ClusterTree, TreeNode, TreeBuilder, as_matrix, epsilon_budget
from .errors import CleanError, InputError


@dataclass(frozen=True)
class ApproxParams:
    epsilon: float
    min_cluster: int

    def __post_init__(self):
        if not 0 <= self.epsilon < 1:
            raise InputError(f"epsilon must lie in [0, 1), got {self.epsilon}")
        if self.min_cluster < 1:
            raise InputError(f"min_cluster must be >= 1, got {self.min_cluster}")

    def budget(self, n: int) -> int:
        return epsilon_budget(self.epsilon, n)


@dataclass(frozen=True)
class CandidateSet:
    pair: tuple
    members: tuple  # block indices of the current clustering
    escape: tuple = ()


@dataclass(frozen=True)
class ApproxCheck:
    ok: bool
    candidates: CandidateSet
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def _labels(C, n: int) -> np.ndarray:
    if isinstance(C, Clustering):
        if C.n != n:
            raise InputError(f"clustering covers {C.n} points, matrix has {n}")
        return C.labels()
    labels = np.asarray(C, dtype=np.intp)
    if labels.shape != (n,):
        raise InputError("label vector does not match the matrix")
    return labels


def candidate_set(D, C, p: int, q: int, params: ApproxParams) -> CandidateSet:
    """Clusters touching ``B(p, d(p,q))`` with at most the point budget outside it."""
    D = as_matrix(D)
    if p == q:
        raise InputError("candidate set needs p != q")
    labels = _labels(C, D.n)
    budget = params.budget(D.n)
    inside = D.d[p] <= D.d[p, q]
    k = labels.max() + 1
    size = np.bincount(labels, minlength=k)
    cnt = np.bincount(labels[inside], minlength=k)
    members = np.flatnonzero((cnt > 0) & (size - cnt <= budget))
    return CandidateSet((p, q), tuple(members.tolist()))


def margin_escapes(d: np.ndarray, inside: np.ndarray, outside: np.ndarray) -> np.ndarray:
    """Outside points ``q1`` for which some ``p1, p2`` in the ball have
    ``d(p1, p2) >= d(p1, q1)``."""
    if outside.size == 0:
        return outside
    reach = d[np.ix_(inside, inside)].max(axis=1)
    bad = (d[np.ix_(inside, outside)] <= reach[:, None]).any(axis=0)
    return outside[bad]


class _Reach:
    """Per-center ``max_{p2 in ball} d(p1, p2)`` for ball members ``p1``,
    extended lazily as the ball around the center grows."""

    def __init__(self, d, order):
        self.d, self.order = d, order
        self.vals = np.zeros(len(order))
        self.m = 0

    def upto(self, m: int) -> np.ndarray:
        if m > self.m:
            old, new = self.order[: self.m], self.order[self.m : m]
            ball = self.order[:m]
            if self.m:
                np.maximum(self.vals[: self.m], self.d[np.ix_(old, new)].max(axis=1),
                           out=self.vals[: self.m])
            self.vals[self.m : m] = self.d[np.ix_(new, ball)].max(axis=1)
            self.m = m
        return self.vals[:m]


def _too_many_escapes(d, row, order, m, radius, budget, metric, reach, chunk=64) -> bool:
    """``margin_escapes(d, order[:m], order[m:]).size > budget`` for the ball
    around ``row`` with points ``order`` sorted by distance from the center.

    On a metric, an outside point farther than ``3 radius`` from the center
    is farther than ``2 radius`` from every ball member and cannot escape, so
    only the shell up to ``3 radius`` is scanned, nearest first, stopping as
    soon as the budget is exceeded.
    """
    inside = order[:m]
    hi = len(order)
    if metric:
        hi = int(np.searchsorted(row[order], 3 * radius * (1 + 1e-9), side="right"))
    if hi <= m:
        return False
    r = reach.upto(m)[:, None]
    found = 0
    for s in range(m, hi, chunk):
        cols = order[s : min(s + chunk, hi)]
        found += int((d[np.ix_(inside, cols)] <= r).any(axis=0).sum())
        if found > budget:
            return True
    return False


def approx_closure_check(D, C, p: int, q: int, params: ApproxParams) -> ApproxCheck:
    """Does ``B(p, d(p,q))`` satisfy the approximate closure condition w.r.t. ``C``?

    On success the returned candidate set carries the escape set ``E``: every
    outside point that violates the margin for some pair of ball members.
    """
    D = as_matrix(D)
    cand = candidate_set(D, C, p, q, params)
    labels = _labels(C, D.n)
    budget = params.budget(D.n)
    inside = D.d[p] <= D.d[p, q]
    in_union = np.isin(labels, cand.members)
    if in_union.sum() < params.min_cluster - budget:
        return ApproxCheck(False, cand, "size")
    if (in_union & ~inside).sum() > budget:
        return ApproxCheck(False, cand, "coverage")
    esc = margin_escapes(D.d, np.flatnonzero(inside), np.flatnonzero(~inside))
    if esc.size > budget:
        return ApproxCheck(False, cand, "margin")
    return ApproxCheck(True, CandidateSet(cand.pair, cand.members, tuple(esc.tolist())))


def approx_closure_tree(D, params: ApproxParams) -> ClusterTree:
    """Scan balls ``B(p, d(p,q))`` by increasing radius and merge the candidate
    set of every ball that passes the approximate closure condition and has
    more than one candidate.

    Each distance is scanned from both endpoints (ties: smaller pair first,
    then smaller center).  If clusters remain at the end they are joined
    under a synthetic root.
    """
    D = as_matrix(D)
    d, n = D.d, D.n
    budget = params.budget(n)
    need = params.min_cluster - budget
    builder = TreeBuilder([i] for i in range(n))
    if n < 2:
        return builder.finish()
    L, pos, last = neighbor_order(D)
    label = np.arange(n)
    size = {i: 1 for i in range(n)}
    # per center: cluster id -> members inside the ball grown so far
    counts = [dict() for _ in range(n)]
    grown = np.zeros(n, dtype=np.intp)
    reach: dict[int, _Reach] = {}
    ps, qs, vals = sorted_ordered_pairs(d)
    for p, q, v in zip(ps.tolist(), qs.tolist(), vals.tolist()):
        e = int(last[p, pos[p, q]])
        m = e + 1
        if m + budget < need:
            continue  # union of candidates is at most ball + budget
        cp = counts[p]
        for x in L[p, grown[p] : m].tolist():
            lab = int(label[x])
            cp[lab] = cp.get(lab, 0) + 1
        grown[p] = max(grown[p], m)
        U = [c for c, cnt in cp.items() if size[c] - cnt <= budget]
        if len(U) < 2:
            continue
        total = sum(size[c] for c in U)
        if total < need:
            continue
        if total - sum(cp[c] for c in U) > budget:
            continue
        if p not in reach:
            reach[p] = _Reach(d, L[p])
        if _too_many_escapes(d, d[p], L[p], m, v, budget, D.metric, reach[p]):
            continue
        new = builder.merge(U, v)
        merged = set(U)
        label[np.isin(label, U)] = new
        size[new] = total
        for cnt in counts:
            hits = [cnt.pop(c) for c in merged if c in cnt]
            if hits:
                cnt[new] = sum(hits)
    return builder.finish()


def lower_median(values: np.ndarray) -> float:
    s = np.sort(values)
    return float(s[(len(s) - 1) // 2])


def clean_tree(T: ClusterTree, D) -> ClusterTree:
    """Drop the singleton children of nodes that have nothing else, then move
    every remaining singleton leaf into the non-singleton leaf of smallest
    median distance (lower median; ties to the smaller node id).
    """
    D = as_matrix(D)
    nodes = list(T.nodes)
    order = T.postorder()

    def singleton_leaf(i):
        return nodes[i].is_leaf and len(nodes[i].members) == 1

    for i in order:
        node = nodes[i]
        if node.children and all(singleton_leaf(c) for c in node.children):
            nodes[i] = TreeNode(node.members, (), 0, node.height)

    reachable = _reachable(nodes, T.root)
    leaves = [i for i in reachable if nodes[i].is_leaf]
    big = sorted(i for i in leaves if len(nodes[i].members) > 1)
    single = sorted(i for i in leaves if len(nodes[i].members) == 1)
    if not big:
        raise CleanError("tree has no non-singleton leaf to attach points to")
    extra = {i: [] for i in big}
    for s in single:
        x = nodes[s].members[0]
        meds = [lower_median(D.d[x, list(nodes[b].members)]) for b in big]
        extra[big[int(np.argmin(meds))]].append(x)

    # rebuild bottom-up without the singleton leaves, splicing out unary nodes
    new_nodes: list[TreeNode] = []
    remap: dict[int, int] = {}
    for i in order:
        if i not in reachable:
            continue
        node = nodes[i]
        if node.is_leaf:
            if len(node.members) > 1:
                members = tuple(sorted(node.members + tuple(extra[i])))
                new_nodes.append(TreeNode(members, (), 0, node.height))
                remap[i] = len(new_nodes) - 1
            continue
        kids = [remap[c] for c in node.children if c in remap]
        if len(kids) == 1:
            remap[i] = kids[0]
        elif kids:
            members = tuple(sorted(x for c in kids for x in new_nodes[c].members))
            new_nodes.append(TreeNode(members, tuple(kids), node.step, node.height))
            remap[i] = len(new_nodes) - 1
    return ClusterTree(tuple(new_nodes), remap[T.root], T.synthetic_root)


def _reachable(nodes, root) -> set:
    seen, stack = set(), [root]
    while stack:
        i = stack.pop()
        seen.add(i)
        stack.extend(nodes[i].children)
    return seen

"""Minimum-cost k-pruning of a cluster tree by dynamic programming."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import Clustering, ClusterTree, ObjectiveKind, TreeNode, as_matrix
from .errors import InfeasibleError, InputError


def binarize(T: ClusterTree) -> ClusterTree:
    """Replace every node with children ``R1..Rt`` (t > 2) by a left fold
    ``((R1, R2), R3), ...``.  Member sets of original nodes are preserved and
    every pruning of ``T`` remains a pruning of the result.
    """
    if T.is_binary():
        return T
    nodes: list[TreeNode] = []
    remap: dict[int, int] = {}
    step = 0
    for i in T.postorder():
        node = T.nodes[i]
        if node.is_leaf:
            nodes.append(TreeNode(node.members, (), 0, node.height))
            remap[i] = len(nodes) - 1
            continue
        kids = [remap[c] for c in node.children]
        acc = kids[0]
        for c in kids[1:]:
            step += 1
            members = tuple(sorted(nodes[acc].members + nodes[c].members))
            nodes.append(TreeNode(members, (acc, c), step, node.height))
            acc = len(nodes) - 1
        remap[i] = acc
    return ClusterTree(tuple(nodes), remap[T.root], T.synthetic_root)


@dataclass
class DPTable:
    """``cost[node][m]`` is the best cost of splitting ``node`` into exactly
    ``m`` tree nodes (``inf`` when impossible; index 0 unused)."""

    cost: dict = field(default_factory=dict)
    split: dict = field(default_factory=dict)  # node -> array of left-child counts per m
    center: dict = field(default_factory=dict)  # node -> k-median center of the whole node


@dataclass
class PruningResult:
    clustering: Clustering
    cost: float
    table: DPTable
    tree: ClusterTree
    centers: tuple | None = None  # k-median centers, aligned with clustering.blocks


def single_cluster_cost(d: np.ndarray, members, objective, global_centers=False):
    """Cost of one cluster, and its center for k-median (smallest index on ties)."""
    members = list(members)
    if ObjectiveKind(objective) is ObjectiveKind.MINSUM:
        return float(d[np.ix_(members, members)].sum()), None
    cand = np.arange(d.shape[0]) if global_centers else np.asarray(members)
    sums = d[np.ix_(cand, members)].sum(axis=1)
    j = int(np.argmin(sums))
    return float(sums[j]), int(cand[j])


def best_pruning(T: ClusterTree, D, k: int, objective=ObjectiveKind.KMEDIAN,
                 global_centers: bool = False) -> PruningResult:
    """Cheapest pruning of ``T`` into exactly ``k`` clusters.

    Multiway trees are binarized first.  For k-median each cluster's center
    is searched among the cluster's own points, or among all points when
    ``global_centers`` is set; in the latter case a center may lie outside its
    block and the returned clustering carries no centers.
    """
    D = as_matrix(D)
    objective = ObjectiveKind(objective)
    if k < 1:
        raise InputError(f"k must be >= 1, got {k}")
    if T.n != D.n:
        raise InputError(f"tree covers {T.n} points, matrix has {D.n}")
    T = binarize(T)
    n_leaves = len(T.leaves())
    if k > n_leaves:
        raise InfeasibleError(f"k={k} exceeds the {n_leaves} leaves of the tree")

    d = D.d
    table = DPTable()
    leaf_count: dict[int, int] = {}
    for i in T.postorder():
        node = T.nodes[i]
        cost = np.full(k + 1, np.inf)
        cost[1], table.center[i] = single_cluster_cost(d, node.members, objective, global_centers)
        if node.is_leaf:
            leaf_count[i] = 1
        else:
            a, b = node.children
            leaf_count[i] = leaf_count[a] + leaf_count[b]
            ca, cb = table.cost[a], table.cost[b]
            split = np.zeros(k + 1, dtype=np.intp)
            for m in range(2, min(k, leaf_count[i]) + 1):
                sums = ca[1:m] + cb[m - 1 : 0 : -1]
                j = int(np.argmin(sums))
                cost[m] = sums[j]
                split[m] = j + 1
            table.split[i] = split
        table.cost[i] = cost

    blocks, centers = [], []
    stack = [(T.root, k)]
    while stack:
        i, m = stack.pop()
        if m == 1:
            blocks.append(T.nodes[i].members)
            centers.append(table.center[i])
            continue
        a, b = T.nodes[i].children
        m1 = int(table.split[i][m])
        stack.append((b, m - m1))
        stack.append((a, m1))
    order = sorted(range(len(blocks)), key=lambda i: blocks[i][0])
    blocks = tuple(blocks[i] for i in order)
    centers = tuple(centers[i] for i in order) if objective is ObjectiveKind.KMEDIAN else None
    C = Clustering(blocks, None if global_centers else centers)
    return PruningResult(C, float(table.cost[T.root][k]), table, T, centers)

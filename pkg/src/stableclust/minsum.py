"""Nearest-neighbor component initialization and average linkage for min-sum."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .core import ClusterTree, TreeBuilder, as_matrix
from .errors import InputError


@dataclass(frozen=True)
class ComponentGraph:
    adjacency: csr_matrix  # symmetric, boolean
    components: tuple  # sorted tuples of point indices, ordered by smallest member


def neighbors_for(min_cluster: int) -> int:
    """Neighbor count used for component initialization: floor(min_cluster / 2)."""
    return int(min_cluster) // 2


def knn_components(D, t: int) -> ComponentGraph:
    """Connect every point to its ``t`` nearest other points (ties to the
    smaller index) and return the connected components of the undirected graph."""
    D = as_matrix(D)
    n = D.n
    if not 0 <= t <= max(n - 1, 0):
        raise InputError(f"t must lie in [0, {n - 1}], got {t}")
    idx = np.arange(n)
    rows, cols = [], []
    for p in range(n):
        order = np.lexsort((idx, D.d[p]))
        nbrs = order[order != p][:t]
        rows.extend([p] * len(nbrs))
        cols.extend(nbrs.tolist())
    adj = csr_matrix((np.ones(len(rows), dtype=bool), (rows, cols)), shape=(n, n))
    adj = (adj + adj.T).astype(bool)
    _, lab = connected_components(adj, directed=False)
    comps = {}
    for p, c in enumerate(lab):
        comps.setdefault(int(c), []).append(p)
    components = tuple(sorted((tuple(v) for v in comps.values()), key=lambda b: b[0]))
    return ComponentGraph(adj.tocsr(), components)


def average_linkage_tree(D, G) -> ClusterTree:
    """Average linkage starting from the components of ``G``.

    Merges the pair with the smallest average cross distance, ties to the
    smaller ``(cluster id, cluster id)``; components are clusters ``0..m-1``
    in the order given and each merge creates the next id.  Cross sums are
    updated as ``d_sum(A ∪ B, C) = d_sum(A, C) + d_sum(B, C)``.
    """
    D = as_matrix(D)
    components = G.components if isinstance(G, ComponentGraph) else tuple(G)
    if not components or any(len(c) == 0 for c in components):
        raise InputError("average linkage needs non-empty components")
    m = len(components)
    builder = TreeBuilder(components)
    cap = 2 * m
    S = np.zeros((cap, cap))
    size = np.zeros(cap)
    labels = np.empty(D.n, dtype=np.intp)
    for i, c in enumerate(components):
        labels[list(c)] = i
        size[i] = len(c)
    # component-level cross sums via one indicator product
    ind = np.zeros((D.n, m))
    ind[np.arange(D.n), labels] = 1.0
    S[:m, :m] = ind.T @ D.d @ ind
    active = list(range(m))
    while len(active) > 1:
        act = np.asarray(active)
        avg = S[np.ix_(act, act)] / np.outer(size[act], size[act])
        avg[np.tril_indices(len(act))] = np.inf
        flat = int(np.argmin(avg))
        a, b = divmod(flat, len(act))
        i, j = int(act[a]), int(act[b])
        new = builder.merge([i, j], avg[a, b])
        S[new, :] = S[i, :] + S[j, :]
        S[:, new] = S[new, :]
        S[new, new] = S[i, i] + S[j, j] + 2 * S[i, j]
        size[new] = size[i] + size[j]
        active = [x for x in active if x not in (i, j)] + [new]
    return builder.finish()

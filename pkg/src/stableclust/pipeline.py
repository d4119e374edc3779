"""End-to-end routes: build a tree, then take its cheapest k-pruning."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable

from .approx import ApproxParams, approx_closure_tree, clean_tree
from .closure import closure_linkage_tree, closure_linkage_tree_fast
from .core import ClusterTree, Clustering, ObjectiveKind, as_matrix
from .errors import ClusteringError, InfeasibleError, InputError
from .minsum import average_linkage_tree, knn_components, neighbors_for
from .pruning import best_pruning


@dataclass
class PipelineResult:
    algorithm: str
    clustering: Clustering
    cost: float
    tree: ClusterTree
    params: dict = field(default_factory=dict)


def kmedian_closure(D, k: int, fast: bool = True) -> PipelineResult:
    """Closure linkage followed by the k-median pruning DP."""
    D = as_matrix(D)
    T = closure_linkage_tree_fast(D) if fast else closure_linkage_tree(D)
    res = best_pruning(T, D, k, ObjectiveKind.KMEDIAN)
    name = "kmedian-closure-fast" if fast else "kmedian-closure"
    return PipelineResult(name, res.clustering, res.cost, T)


def kmedian_approx(D, k: int, epsilon: float, min_cluster: int,
                   global_centers: bool = False) -> PipelineResult:
    """Approximate closure linkage, tree cleaning, then the k-median DP.

    The returned tree is the cleaned one.
    """
    D = as_matrix(D)
    params = ApproxParams(epsilon, min_cluster)
    T = clean_tree(approx_closure_tree(D, params), D)
    res = best_pruning(T, D, k, ObjectiveKind.KMEDIAN, global_centers=global_centers)
    return PipelineResult("kmedian-approx", res.clustering, res.cost, T,
                          {"epsilon": epsilon, "min_cluster": min_cluster})


def minsum_linkage(D, k: int, min_cluster: int) -> PipelineResult:
    """Nearest-neighbor components, average linkage, then the min-sum DP."""
    D = as_matrix(D)
    if min_cluster < 1:
        raise InputError(f"min_cluster must be >= 1, got {min_cluster}")
    t = min(neighbors_for(min_cluster), D.n - 1)
    T = average_linkage_tree(D, knn_components(D, t))
    res = best_pruning(T, D, k, ObjectiveKind.MINSUM)
    return PipelineResult("minsum", res.clustering, res.cost, T, {"min_cluster": min_cluster})


def sweep_min_cluster(run: Callable[[int], PipelineResult], n: int,
                      candidates: Iterable[int] | None = None) -> PipelineResult:
    """Run ``run(m)`` for every candidate minimum cluster size and keep the
    cheapest result (smaller ``m`` on ties).  Candidates whose run fails with
    a clustering error are skipped."""
    best = None
    tried = 0
    for m in (range(1, n + 1) if candidates is None else candidates):
        tried += 1
        try:
            res = run(int(m))
        except ClusteringError:
            continue
        if best is None or res.cost < best.cost:
            best = res
    if best is None:
        raise InfeasibleError(f"no feasible run among {tried} min_cluster candidates")
    best.params = {**best.params, "swept": tried}
    return best

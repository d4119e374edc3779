"""Exact and approximate clustering of perturbation-resilient instances."""

from .approx import ApproxParams, approx_closure_check, approx_closure_tree, candidate_set, clean_tree
from .closure import (closure_distance, closure_linkage_tree, closure_linkage_tree_fast,
                      build_neighbor_tables)
from .core import (ClusterTree, Clustering, DistanceMatrix, ObjectiveKind, TreeNode, ValidationReport,
                   clustering_distance, d_avg, d_sum, kmedian_cost, minsum_cost, objective_cost,
                   validate_metric)
from .errors import ClusteringError, CleanError, GenError, InfeasibleError, InputError, ScaleError
from .minsum import ComponentGraph, average_linkage_tree, knn_components
from .pipeline import PipelineResult, kmedian_approx, kmedian_closure, minsum_linkage, sweep_min_cluster
from .pruning import DPTable, PruningResult, best_pruning, binarize
from .sublinear import ImplicitClustering, sublinear_kmedian, sublinear_minsum

__all__ = [
    "ApproxParams", "CleanError", "ClusterTree", "Clustering", "ClusteringError", "ComponentGraph",
    "DPTable", "DistanceMatrix", "GenError", "ImplicitClustering", "InfeasibleError", "InputError",
    "ObjectiveKind", "PipelineResult", "PruningResult", "ScaleError", "TreeNode", "ValidationReport",
    "approx_closure_check", "approx_closure_tree", "average_linkage_tree", "best_pruning", "binarize",
    "build_neighbor_tables", "candidate_set", "clean_tree", "closure_distance", "closure_linkage_tree",
    "closure_linkage_tree_fast", "clustering_distance", "d_avg", "d_sum", "kmedian_approx",
    "kmedian_closure", "kmedian_cost", "knn_components", "minsum_cost", "minsum_linkage",
    "objective_cost", "sublinear_kmedian", "sublinear_minsum", "sweep_min_cluster", "validate_metric",
]

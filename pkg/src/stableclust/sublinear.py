"""Cluster a uniform sample, then extend the result to every point."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (Clustering, ObjectiveKind, as_matrix, assign_to_centers, best_centers,
                   kmedian_cost, minsum_cost)
from .errors import InputError
from .pipeline import kmedian_approx, minsum_linkage

DEFAULT_SLACK = 0.2


@dataclass(frozen=True)
class ImplicitClustering:
    """A full clustering represented by sampled points only.

    For k-median the representation is a set of sampled centers and every
    point joins its nearest center.  For min-sum it is the sample's
    clustering and every unsampled point joins the block with the smallest
    distance sum.
    """

    objective: ObjectiveKind
    sample: tuple
    centers: tuple | None = None
    sample_blocks: tuple | None = None

    def __post_init__(self):
        s = set(self.sample)
        refs = list(self.centers or ()) + [p for b in (self.sample_blocks or ()) for p in b]
        if not set(refs) <= s:
            raise InputError("implicit clustering references unsampled points")

    def assign(self, D) -> Clustering:
        D = as_matrix(D)
        if ObjectiveKind(self.objective) is ObjectiveKind.KMEDIAN:
            return assign_to_centers(D, self.centers)
        blocks = [list(b) for b in self.sample_blocks]
        sums = np.column_stack([D.d[:, b].sum(axis=1) for b in blocks])
        labels = np.argmin(sums, axis=1)
        for i, b in enumerate(blocks):
            labels[b] = i
        return Clustering.from_labels(labels)

    def to_dict(self) -> dict:
        return {
            "objective": ObjectiveKind(self.objective).value,
            "sample": [int(x) for x in self.sample],
            "centers": None if self.centers is None else [int(c) for c in self.centers],
            "sample_blocks": None if self.sample_blocks is None
            else [[int(x) for x in b] for b in self.sample_blocks],
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "ImplicitClustering":
        blocks = obj.get("sample_blocks")
        centers = obj.get("centers")
        return cls(ObjectiveKind(obj["objective"]), tuple(obj["sample"]),
                   None if centers is None else tuple(centers),
                   None if blocks is None else tuple(tuple(b) for b in blocks))


@dataclass
class SublinearResult:
    implicit: ImplicitClustering
    clustering: Clustering
    cost: float
    sample_params: dict


def draw_sample(N: int, n: int, seed) -> np.ndarray:
    if not 1 <= n <= N:
        raise InputError(f"sample size must lie in [1, {N}], got {n}")
    rng = np.random.default_rng(seed)
    return np.sort(rng.choice(N, size=n, replace=False))


def sublinear_kmedian(D, n: int, k: int, epsilon: float, min_cluster: int, seed=0,
                      slack: float = DEFAULT_SLACK, oracle_centers: bool = False) -> SublinearResult:
    """k-median on a uniform sample of ``n`` points, extended by nearest center.

    On the sample the bad-point budget doubles to ``2 epsilon`` and the
    minimum cluster size becomes ``floor((1 - slack) min_cluster n / N)``,
    allowing clusters to be under-represented by a ``slack`` fraction.  With
    ``n = N`` the parameters are used unchanged.  ``oracle_centers``
    re-optimizes each block's center over all its points after assignment.
    """
    D = as_matrix(D)
    N = D.n
    sample = draw_sample(N, n, seed)
    if n == N:
        eps_s, mc_s = epsilon, min_cluster
    else:
        eps_s = 2 * epsilon
        mc_s = math.floor((1 - slack) * min_cluster * n / N)
    if mc_s < 1 or eps_s >= 1:
        raise InputError(f"sample of {n} too small: scaled min_cluster {mc_s}, epsilon {eps_s}")
    res = kmedian_approx(D.submatrix(sample), k, eps_s, mc_s)
    centers = tuple(sorted(int(sample[c]) for c in res.clustering.centers))
    implicit = ImplicitClustering(ObjectiveKind.KMEDIAN, tuple(sample.tolist()), centers=centers)
    full = implicit.assign(D)
    if oracle_centers:
        full = best_centers(D, full)
    return SublinearResult(implicit, full, kmedian_cost(D, full),
                           {"epsilon": eps_s, "min_cluster": mc_s})


def sublinear_minsum(D, n: int, k: int, min_cluster: int, seed=0) -> SublinearResult:
    """Min-sum on a uniform sample of ``n`` points, extended by smallest
    distance sum to a sample block.  The minimum cluster size is scaled to
    ``floor(min_cluster n / N)``."""
    D = as_matrix(D)
    N = D.n
    sample = draw_sample(N, n, seed)
    mc_s = math.floor(min_cluster * n / N)
    if mc_s < 1:
        raise InputError(f"sample of {n} too small: scaled min_cluster {mc_s}")
    res = minsum_linkage(D.submatrix(sample), k, mc_s)
    blocks = tuple(tuple(int(sample[p]) for p in b) for b in res.clustering.blocks)
    implicit = ImplicitClustering(ObjectiveKind.MINSUM, tuple(sample.tolist()), sample_blocks=blocks)
    full = implicit.assign(D)
    return SublinearResult(implicit, full, minsum_cost(D, full), {"min_cluster": mc_s})


def kmedian_sample_size(k: int, N: int, diameter: float, lam: float, epsilon: float,
                        zeta: float, delta: float) -> int:
    """``k D^2 / (lam^2 eps^2 zeta^2) ln(N / delta)`` with constant 1, where
    ``zeta`` is the average optimal cost per point.  Guidance only."""
    return math.ceil(k * diameter**2 / (lam**2 * epsilon**2 * zeta**2) * math.log(N / delta))


def minsum_sample_size(k: int, N: int, diameter: float, rho: float, eta: float, delta: float) -> int:
    """``D^2 / (rho^2 eta^2) ln(N k / delta)`` with constant 1.  Guidance only."""
    return math.ceil(diameter**2 / (rho**2 * eta**2) * math.log(N * k / delta))

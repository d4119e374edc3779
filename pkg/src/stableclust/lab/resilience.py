"""Empirical perturbation-resilience checks.

Resilience quantifies over every admissible perturbation, so sampling can
only refute it.  A PASS here means no sampled or targeted perturbation moved
the optimum by more than the point budget.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import ObjectiveKind, clustering_distance
from .checks import identify_bad_points
from .instances import PlantedInstance
from .oracles import brute_force_kmedian, brute_force_minsum
from .perturb import bad_point_perturbation, blowup_cluster, sample_perturbation, subset_blowup


@dataclass(frozen=True)
class ResilienceVerdict:
    passed: bool
    trials: int
    pass_count: int
    worst_distance: int
    budget: int
    worst_kind: str = ""

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def targeted_perturbations(inst: PlantedInstance, alpha: float, rng):
    """Deterministic worst-case style perturbations for ``inst`` as ``(kind, matrix)``."""
    D, C = inst.matrix, inst.truth
    for i in range(C.k):
        yield f"blowup[{i}]", blowup_cluster(D, C, i, alpha)
    if ObjectiveKind(inst.objective) is ObjectiveKind.KMEDIAN and C.k > 1 and C.centers is not None:
        per = identify_bad_points(D, C, alpha).per_cluster
        cap = inst.budget + 1
        selected = [p for bad in per for p in bad[:cap]]
        if selected:
            yield "bad-points", bad_point_perturbation(D, C, alpha, selected)
    if ObjectiveKind(inst.objective) is ObjectiveKind.MINSUM:
        for i, block in enumerate(C.blocks):
            if len(block) < 2:
                continue
            size = int(rng.integers(1, len(block)))
            A = rng.choice(block, size=size, replace=False)
            yield f"subset[{i}]", subset_blowup(D, C, i, A, alpha)


def check_perturbation_resilience(inst: PlantedInstance, trials: int = 20, seed: int = 0,
                                  alpha: float | None = None, targeted: bool = True) -> ResilienceVerdict:
    """Solve every sampled perturbation exactly and compare with the planted clustering.

    Runs ``trials`` uniform perturbations plus, if ``targeted``, the
    perturbations from :func:`targeted_perturbations`.  PASS iff the largest
    clustering distance to the planted clustering stays within
    ``floor(epsilon n)``.
    """
    alpha = inst.alpha if alpha is None else alpha
    rng = np.random.default_rng(seed)
    objective = ObjectiveKind(inst.objective)
    oracle = brute_force_kmedian if objective is ObjectiveKind.KMEDIAN else brute_force_minsum

    def perturbations():
        for t in range(trials):
            yield f"uniform[{t}]", sample_perturbation(inst.matrix, alpha, rng.integers(2**63))
        if targeted and alpha > 1:
            yield from targeted_perturbations(inst, alpha, rng)

    budget = inst.budget
    runs = passes = worst = 0
    worst_kind = ""
    for kind, Dp in perturbations():
        opt = oracle(Dp, inst.k).clustering
        dist = clustering_distance(inst.truth, opt).count
        runs += 1
        passes += dist <= budget
        if dist > worst or not worst_kind:
            worst, worst_kind = max(worst, dist), kind
    return ResilienceVerdict(worst <= budget, runs, passes, worst, budget, worst_kind)

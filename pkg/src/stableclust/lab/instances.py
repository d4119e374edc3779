from __future__ import annotations

from dataclasses import dataclass, field

from ..core import Clustering, DistanceMatrix, ObjectiveKind, epsilon_budget


@dataclass(frozen=True)
class PlantedInstance:
    """A distance matrix with the clustering it was built around.

    ``alpha`` and ``epsilon`` are the resilience parameters the generator
    aimed for (``epsilon = 0`` for exact resilience).  ``extra`` holds
    generator-specific ground truth such as the planted bad points.
    """

    matrix: DistanceMatrix
    truth: Clustering
    alpha: float
    epsilon: float = 0.0
    objective: ObjectiveKind = ObjectiveKind.KMEDIAN
    generator: str = ""
    seed: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.matrix.n

    @property
    def k(self) -> int:
        return self.truth.k

    @property
    def min_cluster(self) -> int:
        return min(len(b) for b in self.truth.blocks)

    @property
    def budget(self) -> int:
        return epsilon_budget(self.epsilon, self.n)

    def sidecar(self) -> dict:
        return {
            "truth": self.truth.to_dict(),
            "alpha": self.alpha,
            "epsilon": self.epsilon,
            "objective": ObjectiveKind(self.objective).value,
            "seed": self.seed,
            "generator": self.generator,
        }

    @classmethod
    def from_sidecar(cls, matrix: DistanceMatrix, meta: dict) -> "PlantedInstance":
        return cls(
            matrix=matrix,
            truth=Clustering.from_dict(meta["truth"]),
            alpha=float(meta["alpha"]),
            epsilon=float(meta.get("epsilon", 0.0)),
            objective=ObjectiveKind(meta.get("objective", "kmedian")),
            generator=meta.get("generator", ""),
            seed=int(meta.get("seed", 0)),
        )

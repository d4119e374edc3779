"""Shared data types, clustering objectives, and comparisons between clusterings.

Distances are 64-bit floats.  Every ordering decision elsewhere in the package
compares them exactly and breaks ties lexicographically on point or cluster
indices, so two implementations that make the same decisions produce the same
trees.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import InputError

# Triangle checks on Euclidean-embedded matrices see round-off on collinear
# triples; violations smaller than this fraction of the largest entry are ignored.
TRIANGLE_RTOL = 1e-12


class ObjectiveKind(str, enum.Enum):
    KMEDIAN = "kmedian"
    MINSUM = "minsum"


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    """Symmetric matrix of nonnegative dissimilarities between ``n`` points.

    ``metric`` records whether the triangle inequality is expected to hold.
    Perturbed matrices are generally not metric and carry ``metric=False``.
    Only shape and finiteness are enforced here; use :func:`validate_metric`
    for the full set of checks.
    """

    d: np.ndarray
    metric: bool = True

    def __post_init__(self):
        arr = np.array(self.d, dtype=np.float64, copy=True)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise InputError(f"distance matrix must be square, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InputError("distance matrix has non-finite entries")
        arr.setflags(write=False)
        object.__setattr__(self, "d", arr)

    @property
    def n(self) -> int:
        return self.d.shape[0]

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, key):
        return self.d[key]

    def submatrix(self, idx: Sequence[int]) -> "DistanceMatrix":
        idx = np.asarray(idx, dtype=np.intp)
        return DistanceMatrix(self.d[np.ix_(idx, idx)], metric=self.metric)

    def diameter(self) -> float:
        return float(self.d.max()) if self.n else 0.0


def as_matrix(D) -> DistanceMatrix:
    return D if isinstance(D, DistanceMatrix) else DistanceMatrix(D)


@dataclass(frozen=True)
class Clustering:
    """A partition of ``{0, ..., n-1}`` into non-empty blocks.

    ``centers`` is optional; when given, ``centers[i]`` must lie in ``blocks[i]``.
    Blocks are stored as sorted tuples so equal partitions with equal block
    order compare equal.
    """

    blocks: tuple
    centers: tuple | None = None

    def __post_init__(self):
        blocks = tuple(tuple(sorted(int(x) for x in b)) for b in self.blocks)
        if not blocks:
            raise InputError("a clustering needs at least one block")
        if any(len(b) == 0 for b in blocks):
            raise InputError("clustering blocks must be non-empty")
        seen = [x for b in blocks for x in b]
        if len(set(seen)) != len(seen):
            raise InputError("clustering blocks overlap")
        if set(seen) != set(range(len(seen))):
            raise InputError("clustering blocks must cover 0..n-1")
        object.__setattr__(self, "blocks", blocks)
        if self.centers is not None:
            centers = tuple(int(c) for c in self.centers)
            if len(centers) != len(blocks):
                raise InputError("need exactly one center per block")
            for c, b in zip(centers, blocks):
                if c not in b:
                    raise InputError(f"center {c} is not in its block")
            object.__setattr__(self, "centers", centers)

    @property
    def k(self) -> int:
        return len(self.blocks)

    @property
    def n(self) -> int:
        return sum(len(b) for b in self.blocks)

    def labels(self) -> np.ndarray:
        out = np.empty(self.n, dtype=np.intp)
        for i, b in enumerate(self.blocks):
            out[list(b)] = i
        return out

    @classmethod
    def from_labels(cls, labels: Iterable[int], centers=None) -> "Clustering":
        """Build from a label vector.  Blocks are ordered by label value."""
        labels = np.asarray(list(labels), dtype=np.intp)
        uniq = np.unique(labels)
        blocks = [np.flatnonzero(labels == u).tolist() for u in uniq]
        return cls(tuple(blocks), centers)

    def canonical(self) -> "Clustering":
        """Same clustering with blocks ordered by their smallest member."""
        order = sorted(range(self.k), key=lambda i: self.blocks[i][0])
        centers = None if self.centers is None else tuple(self.centers[i] for i in order)
        return Clustering(tuple(self.blocks[i] for i in order), centers)

    def partition(self) -> frozenset:
        return frozenset(frozenset(b) for b in self.blocks)

    def same_partition(self, other: "Clustering") -> bool:
        return self.partition() == other.partition()

    def to_dict(self, cost: float | None = None) -> dict:
        return {
            "k": self.k,
            "blocks": [list(b) for b in self.blocks],
            "centers": None if self.centers is None else list(self.centers),
            "cost": cost,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "Clustering":
        blocks = obj["blocks"]
        if "k" in obj and obj["k"] is not None and obj["k"] != len(blocks):
            raise InputError(f"k={obj['k']} does not match {len(blocks)} blocks")
        return cls(tuple(tuple(b) for b in blocks), obj.get("centers"))


@dataclass(frozen=True)
class TreeNode:
    members: tuple
    children: tuple = ()
    step: int = 0
    height: float = 0.0

    @property
    def is_leaf(self) -> bool:
        return not self.children


@dataclass(frozen=True)
class ClusterTree:
    """Rooted merge tree.  Nodes are stored in creation order; ``root`` indexes
    the node covering every point.

    Leaves carry step 0 and may hold several points (components).  Each merge
    gets the next step number and the ``height`` at which it happened.
    ``synthetic_root`` is set when the linkage stopped with several clusters
    and a final node was added to join them.
    """

    nodes: tuple
    root: int
    synthetic_root: bool = False

    @property
    def n(self) -> int:
        return len(self.nodes[self.root].members)

    def leaves(self) -> list[int]:
        return [i for i in self._postorder() if self.nodes[i].is_leaf]

    def internal(self) -> list[int]:
        return [i for i in self._postorder() if not self.nodes[i].is_leaf]

    def is_binary(self) -> bool:
        return all(len(self.nodes[i].children) in (0, 2) for i in self._postorder())

    def _postorder(self) -> list[int]:
        out, stack = [], [(self.root, False)]
        while stack:
            i, done = stack.pop()
            if done:
                out.append(i)
                continue
            stack.append((i, True))
            for c in reversed(self.nodes[i].children):
                stack.append((c, False))
        return out

    def postorder(self) -> list[int]:
        return self._postorder()

    def leaf_clustering(self) -> Clustering:
        return Clustering(tuple(self.nodes[i].members for i in self.leaves())).canonical()

    def node_sets(self) -> list[frozenset]:
        return [frozenset(self.nodes[i].members) for i in self._postorder()]

    def merges(self) -> list[int]:
        """Internal nodes in merge order."""
        return sorted(self.internal(), key=lambda i: self.nodes[i].step)

    def partition_sequence(self) -> list[frozenset]:
        """Partition after each merge, starting from the leaf partition."""
        current = {frozenset(self.nodes[i].members) for i in self.leaves()}
        seq = [frozenset(current)]
        for i in self.merges():
            node = self.nodes[i]
            for c in node.children:
                current.discard(frozenset(self.nodes[c].members))
            current.add(frozenset(node.members))
            seq.append(frozenset(current))
        return seq

    def level_partitions(self) -> list[tuple[float, frozenset]]:
        """Partition after all merges at each distinct merge height.

        Pairwise and multiway linkages that agree up to grouping merges done
        at the same height produce equal level sequences.
        """
        merges = self.merges()
        seq = self.partition_sequence()
        out = []
        for pos, i in enumerate(merges):
            h = self.nodes[i].height
            if pos + 1 < len(merges) and self.nodes[merges[pos + 1]].height == h:
                continue
            out.append((h, seq[pos + 1]))
        return out

    def check(self) -> None:
        """Raise InputError if any structural invariant is broken."""
        leaf_members = []
        for i in self._postorder():
            node = self.nodes[i]
            if node.is_leaf:
                leaf_members.extend(node.members)
                continue
            union = []
            for c in node.children:
                union.extend(self.nodes[c].members)
                if self.nodes[c].step >= node.step:
                    raise InputError(f"node {i} created no later than child {c}")
            if len(union) != len(set(union)) or sorted(union) != list(node.members):
                raise InputError(f"node {i} members differ from union of its children")
        if sorted(leaf_members) != list(range(len(leaf_members))):
            raise InputError("leaves do not partition the ground set")


class TreeBuilder:
    """Incremental construction of a ClusterTree from a sequence of merges."""

    def __init__(self, leaves: Iterable[Iterable[int]]):
        self.nodes: list[TreeNode] = []
        self.active: list[int] = []
        for members in leaves:
            self.nodes.append(TreeNode(tuple(sorted(members))))
            self.active.append(len(self.nodes) - 1)
        self.step = 0

    def merge(self, ids: Sequence[int], height: float) -> int:
        ids = sorted(ids)
        if len(ids) < 2:
            raise InputError("a merge needs at least two clusters")
        members = sorted(x for i in ids for x in self.nodes[i].members)
        self.step += 1
        self.nodes.append(TreeNode(tuple(members), tuple(ids), self.step, float(height)))
        new = len(self.nodes) - 1
        drop = set(ids)
        self.active = [i for i in self.active if i not in drop] + [new]
        return new

    def finish(self) -> ClusterTree:
        synthetic = False
        if len(self.active) > 1:
            height = max(self.nodes[i].height for i in self.active)
            self.merge(list(self.active), height)
            synthetic = True
        return ClusterTree(tuple(self.nodes), self.active[0], synthetic)


# --- metric validation -------------------------------------------------------


@dataclass
class ValidationReport:
    ok: bool
    triangle: list = field(default_factory=list)  # (p, q, r, d(p,q), d(p,r)+d(r,q))
    asymmetric: list = field(default_factory=list)  # (p, q)
    nonzero_diagonal: list = field(default_factory=list)
    negative: list = field(default_factory=list)  # (p, q)

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "triangle": [list(t) for t in self.triangle],
            "asymmetric": [list(t) for t in self.asymmetric],
            "nonzero_diagonal": list(self.nonzero_diagonal),
            "negative": [list(t) for t in self.negative],
        }


def validate_metric(D, max_violations: int | None = None) -> ValidationReport:
    """Check symmetry, zero diagonal, nonnegativity and the triangle inequality.

    Triangle violations are reported once per unordered pair ``p < q`` and
    intermediate point ``r`` as ``(p, q, r, d(p,q), d(p,r) + d(r,q))``.
    """
    d = as_matrix(D).d
    n = d.shape[0]
    rep = ValidationReport(ok=True)
    rep.asymmetric = [tuple(map(int, t)) for t in np.argwhere(np.triu(d != d.T, 1))]
    rep.nonzero_diagonal = [int(i) for i in np.flatnonzero(np.diag(d) != 0)]
    rep.negative = [tuple(map(int, t)) for t in np.argwhere(d < 0)]
    tol = TRIANGLE_RTOL * (float(np.abs(d).max()) if n else 0.0)
    upper = np.triu(np.ones((n, n), dtype=bool), 1)
    for r in range(n):
        rhs = d[:, r][:, None] + d[r, :][None, :]
        bad = (d > rhs + tol) & upper
        bad[r, :] = False
        bad[:, r] = False
        for p, q in np.argwhere(bad):
            rep.triangle.append((int(p), int(q), r, float(d[p, q]), float(rhs[p, q])))
            if max_violations is not None and len(rep.triangle) >= max_violations:
                break
        if max_violations is not None and len(rep.triangle) >= max_violations:
            break
    rep.triangle.sort()
    rep.ok = not (rep.triangle or rep.asymmetric or rep.nonzero_diagonal or rep.negative)
    return rep


# --- objectives ----------------------------------------------------------------


def d_sum(D, A: Sequence[int], B: Sequence[int]) -> float:
    d = as_matrix(D).d
    return float(d[np.ix_(list(A), list(B))].sum())


def d_avg(D, A: Sequence[int], B: Sequence[int]) -> float:
    return d_sum(D, A, B) / (len(A) * len(B))


def _check_ground(D: DistanceMatrix, C: Clustering) -> None:
    if C.n != D.n:
        raise InputError(f"clustering covers {C.n} points, matrix has {D.n}")


def kmedian_cost(D, C: Clustering) -> float:
    """Sum over blocks of each member's distance to the block's center."""
    D = as_matrix(D)
    _check_ground(D, C)
    if C.centers is None:
        raise InputError("k-median cost needs centers")
    return float(sum(D.d[c, list(b)].sum() for b, c in zip(C.blocks, C.centers)))


def minsum_cost(D, C: Clustering) -> float:
    """Sum over blocks of d(p, q) over ordered pairs, so each unordered pair counts twice."""
    D = as_matrix(D)
    _check_ground(D, C)
    return float(sum(D.d[np.ix_(b, b)].sum() for b in C.blocks))


def objective_cost(D, C: Clustering, objective: ObjectiveKind) -> float:
    if ObjectiveKind(objective) is ObjectiveKind.KMEDIAN:
        return kmedian_cost(D, C)
    return minsum_cost(D, C)


def best_centers(D, C: Clustering) -> Clustering:
    """Attach to each block its in-block 1-median (smallest index on ties)."""
    d = as_matrix(D).d
    centers = []
    for b in C.blocks:
        costs = d[np.ix_(b, b)].sum(axis=1)
        centers.append(b[int(np.argmin(costs))])
    return Clustering(C.blocks, tuple(centers))


def assign_to_centers(D, centers: Sequence[int]) -> Clustering:
    """Nearest-center assignment; ties go to the smaller center index."""
    d = as_matrix(D).d
    order = sorted(set(int(c) for c in centers))
    idx = np.argmin(d[:, order], axis=1)  # argmin keeps the first, i.e. smallest index
    labels = np.asarray(order)[idx]
    labels[order] = order  # a center keeps itself even if a duplicate point is another center
    blocks = [np.flatnonzero(labels == c).tolist() for c in order]
    return Clustering(tuple(blocks), tuple(order))


# --- closeness -------------------------------------------------------------------


class Closeness(NamedTuple):
    count: int
    matching: tuple  # matching[i] = block of the second clustering paired with block i, -1 if padded
    padded: bool


def clustering_distance(C: Clustering, C2: Clustering) -> Closeness:
    """Minimum over block matchings of the number of points of ``C`` that fall
    outside their matched block of ``C2``.

    Solved as an assignment problem.  When the block counts differ, the
    shorter side is padded with empty blocks and ``padded`` is set.
    """
    if C.n != C2.n:
        raise InputError(f"clusterings cover {C.n} and {C2.n} points")
    k = max(C.k, C2.k)
    overlap = np.zeros((k, k), dtype=np.int64)
    lab2 = C2.labels()
    sizes = np.zeros(k, dtype=np.int64)
    for i, b in enumerate(C.blocks):
        sizes[i] = len(b)
        overlap[i, : C2.k] = np.bincount(lab2[list(b)], minlength=C2.k)
    cost = sizes[:, None] - overlap
    rows, cols = linear_sum_assignment(cost)
    matching = tuple(int(c) if c < C2.k else -1 for r, c in sorted(zip(rows, cols)) if r < C.k)
    return Closeness(int(cost[rows, cols].sum()), matching, C.k != C2.k)


def epsilon_budget(epsilon: float, n: int) -> int:
    """Integer point budget floor(epsilon * n), tolerant of float noise like 0.05 * 40."""
    return int(np.floor(epsilon * n + 1e-9))

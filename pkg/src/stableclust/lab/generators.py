"""Planted-instance generators.

All generators except the bad-point fixture embed points in Euclidean space,
so their matrices are metric by construction.  Each one checks the property
it promises before returning and retries with fresh randomness otherwise.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.spatial.distance import pdist, squareform

from ..core import Clustering, DistanceMatrix, ObjectiveKind, best_centers, epsilon_budget, validate_metric
from ..errors import GenError
from .checks import check_center_stability, identify_bad_points
from .instances import PlantedInstance
from .oracles import brute_force_kmedian, brute_force_minsum

VERIFY_KMEDIAN_MAX_N = 16
VERIFY_MINSUM_MAX_N = 10


def _ball_points(rng, size: int, dim: int, radius: float) -> np.ndarray:
    v = rng.normal(size=(size, dim))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    r = radius * rng.uniform(size=(size, 1)) ** (1.0 / dim)
    return v * r


def _place_centers(rng, k: int, sep: float, dim: int) -> np.ndarray:
    side = sep * (2 + 2 * k ** (1.0 / dim))
    centers: list[np.ndarray] = []
    for _ in range(100 * k + 1000):
        if len(centers) == k:
            break
        x = rng.uniform(0, side, size=dim)
        if all(np.linalg.norm(x - c) >= sep for c in centers):
            centers.append(x)
    if len(centers) < k:
        raise GenError(f"could not place {k} centers {sep} apart")
    return np.array(centers)


def _embed(rng, sizes, sep: float, dim: int, radius: float):
    mus = _place_centers(rng, len(sizes), sep, dim)
    pts = np.vstack([mu + _ball_points(rng, s, dim, radius) for mu, s in zip(mus, sizes)])
    labels = np.repeat(np.arange(len(sizes)), sizes)
    perm = rng.permutation(len(labels))
    return pts[perm], labels[perm], mus


def _check_sizes(k: int, sizes) -> list[int]:
    sizes = [int(s) for s in sizes]
    if len(sizes) != k:
        raise GenError(f"need {k} cluster sizes, got {len(sizes)}")
    if k < 1 or min(sizes) < 1:
        raise GenError("cluster sizes must be >= 1")
    return sizes


def gen_center_stable(k: int, sizes, alpha: float, separation: float | None = None,
                      seed: int = 0, dim: int = 2, max_tries: int = 50) -> PlantedInstance:
    """Unit-radius blobs whose centers are at least ``separation`` apart.

    The default separation ``2.1 (alpha + 1)`` makes the blobs ``alpha``-center
    stable whatever the sampled points.  The planted centers are each block's
    1-median; stability is checked exhaustively, and for ``n <= 16`` the
    planted clustering is also checked to be the unique k-median optimum.
    """
    if alpha <= 1:
        raise GenError(f"alpha must exceed 1, got {alpha}")
    sizes = _check_sizes(k, sizes)
    sep = 2.1 * (alpha + 1) if separation is None else float(separation)
    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        pts, labels, _ = _embed(rng, sizes, sep, dim, 1.0)
        D = DistanceMatrix(squareform(pdist(pts)))
        truth = best_centers(D, Clustering.from_labels(labels)).canonical()
        if not check_center_stability(D, truth, alpha):
            continue
        if D.n <= VERIFY_KMEDIAN_MAX_N:
            opt = brute_force_kmedian(D, k)
            if not (opt.unique and opt.clustering.same_partition(truth)):
                continue
        return PlantedInstance(D, truth, alpha, 0.0, ObjectiveKind.KMEDIAN,
                               "center-stable", seed, {"points": pts})
    raise GenError(f"no {alpha}-center-stable instance after {max_tries} tries")


def gen_approx_kmedian(k: int, sizes, alpha: float, n_bad: int, seed: int = 0,
                       separation: float | None = None, dim: int = 2,
                       max_tries: int = 50, verify_guard: int = 10**6) -> PlantedInstance:
    """Center-stable blobs with ``n_bad`` of their points moved towards another
    blob so that they become bad points while staying nearest to their own center.

    ``epsilon`` is set to ``n_bad / n``.  When the exhaustive k-median oracle is
    affordable (``C(n, k) <= verify_guard``) the planted clustering is checked
    to be the optimum.
    """
    if alpha <= 1:
        raise GenError(f"alpha must exceed 1, got {alpha}")
    sizes = _check_sizes(k, sizes)
    if k < 2 and n_bad:
        raise GenError("bad points need a second cluster")
    n = sum(sizes)
    sep = 2.1 * (alpha + 1) if separation is None else float(separation)
    # fraction of the way to the other center: bad needs t > 1/(alpha+1), own-nearest needs t < 1/2
    lo, hi = 1 / (alpha + 1), 0.5
    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        pts, labels, mus = _embed(rng, sizes, sep, dim, 1.0)
        planted = []
        for b in range(n_bad):
            i = b % k
            cand = [p for p in np.flatnonzero(labels == i) if p not in planted]
            p = int(cand[0])
            j = int(rng.choice([x for x in range(k) if x != i]))
            t = rng.uniform(lo + 0.3 * (hi - lo), hi - 0.3 * (hi - lo))
            pts[p] = mus[i] + t * (mus[j] - mus[i])
            planted.append(p)
        D = DistanceMatrix(squareform(pdist(pts)))
        truth = best_centers(D, Clustering.from_labels(labels)).canonical()
        if set(identify_bad_points(D, truth, alpha).points) != set(planted):
            continue
        if math.comb(n, k) <= verify_guard:
            opt = brute_force_kmedian(D, k)
            if not (opt.unique and opt.clustering.same_partition(truth)):
                continue
        return PlantedInstance(D, truth, alpha, n_bad / n, ObjectiveKind.KMEDIAN,
                               "approx-kmedian", seed,
                               {"points": pts, "bad": tuple(sorted(planted))})
    raise GenError(f"no instance with {n_bad} bad points after {max_tries} tries")


def gen_bad_point_fixture(n: int, epsilon: float, alpha: float, M: float = 100.0) -> PlantedInstance:
    """Two groups of ``(1 - epsilon) n / 2`` points plus ``epsilon n`` bad points.

    Distances: 1 inside each group, ``M`` between the two groups,
    ``M/(alpha+1) + 1`` from the bad points to the first group and
    ``alpha M/(alpha+1) - 1`` to the second.  Layout: first group, second
    group, bad points.  The planted 2-median clustering attaches the bad
    points to the first group.
    """
    if not 0 <= epsilon < 0.2:
        raise GenError(f"epsilon must lie in [0, 1/5), got {epsilon}")
    if alpha <= 1:
        raise GenError(f"alpha must exceed 1, got {alpha}")
    nb = epsilon_budget(epsilon, n)
    if abs(nb - epsilon * n) > 1e-9 or (n - nb) % 2:
        raise GenError("epsilon * n must be an integer and (1 - epsilon) n even")
    g = (n - nb) // 2
    if g < 2:
        raise GenError("groups need at least two points")
    to_g1 = M / (alpha + 1) + 1
    to_g2 = alpha * M / (alpha + 1) - 1
    if not to_g1 < to_g2:
        raise GenError("M too small: bad points must sit closer to the first group")
    if not M > alpha:
        raise GenError("M too small: group points must be good")
    # any solution with both centers on one side pays at least this much
    lopsided = g * to_g2
    planted = (g - 1) + (g - 1) + nb * to_g1 + max(nb - 1, 0)
    if nb and not lopsided > alpha * planted:
        raise GenError("M too small for the planted clustering to survive perturbation")
    G1, G2, B = np.arange(g), np.arange(g, 2 * g), np.arange(2 * g, n)
    d = np.ones((n, n))
    d[np.ix_(G1, G2)] = d[np.ix_(G2, G1)] = M
    d[np.ix_(B, G1)] = d[np.ix_(G1, B)] = to_g1
    d[np.ix_(B, G2)] = d[np.ix_(G2, B)] = to_g2
    np.fill_diagonal(d, 0.0)
    D = DistanceMatrix(d)
    rep = validate_metric(D)
    if not rep.ok:
        raise GenError(f"triangle inequality fails: {rep.triangle[:3]}")
    truth = Clustering((tuple(G1) + tuple(B), tuple(G2)), (0, g))
    return PlantedInstance(D, truth, alpha, epsilon, ObjectiveKind.KMEDIAN, "bad-point", 0,
                           {"G1": tuple(G1), "G2": tuple(G2), "bad": tuple(B.tolist()), "M": M})


def minsum_alpha_bound(sizes) -> float:
    """The resilience factor ``3 max|C_i| / (min|C_i| - 1)`` needed for exact min-sum recovery."""
    return 3 * max(sizes) / (min(sizes) - 1)


def gen_minsum_resilient(k: int, sizes, alpha: float, seed: int = 0, dim: int = 2,
                         max_tries: int = 50) -> PlantedInstance:
    """Blobs of diameter at most 1 spread far enough apart that
    ``alpha |C_i| max_intra < |C_j| min_inter`` for every ordered pair of
    blocks, which implies ``alpha d_sum(A, C_i - A) < d_sum(A, C_j)`` for
    every subset ``A`` of ``C_i``.  For ``n <= 10`` the planted clustering is
    checked against the exhaustive min-sum oracle.
    """
    sizes = _check_sizes(k, sizes)
    if min(sizes) < 2:
        raise GenError("min-sum planting needs every cluster to have >= 2 points")
    if alpha < minsum_alpha_bound(sizes):
        raise GenError(f"alpha {alpha} below 3 max/(min-1) = {minsum_alpha_bound(sizes):.4g}")
    sep = 1.05 * alpha * max(sizes) / min(sizes) + 1.0
    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        pts, labels, _ = _embed(rng, sizes, sep, dim, 0.5)
        D = DistanceMatrix(squareform(pdist(pts)))
        truth = Clustering.from_labels(labels).canonical()
        if not minsum_separated(D, truth, alpha):
            continue
        if D.n <= VERIFY_MINSUM_MAX_N and k > 1:
            opt = brute_force_minsum(D, k)
            if not opt.clustering.same_partition(truth):
                continue
        return PlantedInstance(D, truth, alpha, 0.0, ObjectiveKind.MINSUM, "minsum", seed,
                               {"points": pts})
    raise GenError(f"no separated min-sum instance after {max_tries} tries")


def minsum_separated(D, C: Clustering, alpha: float) -> bool:
    d = D.d
    for i, bi in enumerate(C.blocks):
        bi = list(bi)
        max_intra = d[np.ix_(bi, bi)].max()
        for j, bj in enumerate(C.blocks):
            if i == j:
                continue
            min_inter = d[np.ix_(bi, list(bj))].min()
            if not alpha * len(bi) * max_intra < len(bj) * min_inter:
                return False
    return True

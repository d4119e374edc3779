"""Multiplicative perturbations ``d <= d' <= alpha * d``.

Random perturbations give one-sided evidence of resilience.  The targeted
ones reproduce the perturbations used to derive center stability, the bad
point bound and the min-sum subset inequality, so they are worth running
deterministically on every instance.
"""

from __future__ import annotations

import numpy as np

from ..core import Clustering, DistanceMatrix, as_matrix
from ..errors import InputError


def _check_alpha(alpha: float) -> None:
    if alpha < 1:
        raise InputError(f"alpha must be >= 1, got {alpha}")


def _symmetric_scale(d: np.ndarray, factor: np.ndarray) -> DistanceMatrix:
    f = np.triu(factor, 1)
    f = f + f.T
    np.fill_diagonal(f, 1.0)
    return DistanceMatrix(d * f, metric=False)


def sample_perturbation(D, alpha: float, seed=None) -> DistanceMatrix:
    """Scale each unordered pair by an independent factor drawn from ``[1, alpha]``."""
    _check_alpha(alpha)
    d = as_matrix(D).d
    if alpha == 1:
        return DistanceMatrix(d, metric=False)
    rng = np.random.default_rng(seed)
    return _symmetric_scale(d, rng.uniform(1.0, alpha, size=d.shape))


def blowup_cluster(D, C: Clustering, i: int, alpha: float) -> DistanceMatrix:
    """Multiply every distance inside block ``i`` by ``alpha``."""
    _check_alpha(alpha)
    d = as_matrix(D).d
    f = np.ones_like(d)
    b = list(C.blocks[i])
    f[np.ix_(b, b)] = alpha
    return _symmetric_scale(d, f)


def subset_blowup(D, C: Clustering, i: int, A, alpha: float) -> DistanceMatrix:
    """Multiply distances between ``A`` and the rest of block ``i`` by ``alpha``."""
    _check_alpha(alpha)
    d = as_matrix(D).d
    A = list(A)
    rest = sorted(set(C.blocks[i]) - set(A))
    f = np.ones_like(d)
    f[np.ix_(A, rest)] = alpha
    f[np.ix_(rest, A)] = alpha
    return _symmetric_scale(d, f)


def bad_point_perturbation(D, C: Clustering, alpha: float, selected) -> DistanceMatrix:
    """Blow up every distance by ``alpha`` except ``d(p, c(p))``, where ``c(p)``
    is the nearest other center for selected points and the own center otherwise."""
    _check_alpha(alpha)
    d = as_matrix(D).d
    if C.centers is None:
        raise InputError("bad-point perturbation needs centers")
    centers = np.asarray(C.centers)
    labels = C.labels()
    sel = set(int(x) for x in selected)
    f = np.full_like(d, alpha)
    for p in range(len(d)):
        own = labels[p]
        c = centers[own]
        if p in sel and len(centers) > 1:
            others = np.delete(centers, own)
            c = others[np.argmin(d[p, others])]
        f[p, c] = f[c, p] = 1.0
    return DistanceMatrix(d * f, metric=False)

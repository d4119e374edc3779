import os

import numpy as np
import pytest
from hypothesis import settings
from scipy.spatial.distance import pdist, squareform

from stableclust.core import DistanceMatrix

settings.register_profile("ci", max_examples=40, deadline=None)
settings.register_profile("deep", max_examples=400, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "ci"))


def matrix(rows):
    return DistanceMatrix(np.array(rows, dtype=float))


def random_metric(n, seed, dim=3):
    """Euclidean distances of random points; all distances distinct almost surely."""
    rng = np.random.default_rng(seed)
    return DistanceMatrix(squareform(pdist(rng.normal(size=(n, dim)))))


@pytest.fixture
def two_pairs():
    # a, b close; c, d close; the pairs 10 apart
    return matrix([[0, 1, 10, 10], [1, 0, 10, 10], [10, 10, 0, 1], [10, 10, 1, 0]])


@pytest.fixture
def line3():
    # a-b = 2, b-c = 1, a-c = 3
    return matrix([[0, 2, 3], [2, 0, 1], [3, 1, 0]])


@pytest.fixture
def wedge3():
    # a-b = 1, a-c = 3, b-c = 3
    return matrix([[0, 1, 3], [1, 0, 3], [3, 3, 0]])

import json
import math

import numpy as np
import pytest

from conftest import random_metric
from stableclust.core import Clustering, ObjectiveKind, clustering_distance, kmedian_cost
from stableclust.errors import InfeasibleError, InputError
from stableclust.lab.generators import gen_approx_kmedian, gen_center_stable, gen_minsum_resilient
from stableclust.lab.oracles import brute_force_kmedian
from stableclust.pipeline import kmedian_approx, kmedian_closure, minsum_linkage, sweep_min_cluster
from stableclust.sublinear import (ImplicitClustering, draw_sample, kmedian_sample_size,
                                   minsum_sample_size, sublinear_kmedian, sublinear_minsum)
from stableclust.approx import approx_closure_tree, clean_tree, ApproxParams
from stableclust.pruning import best_pruning


def test_closure_pipeline_two_pairs(two_pairs):
    for fast in (True, False):
        res = kmedian_closure(two_pairs, 2, fast=fast)
        assert res.clustering == Clustering(((0, 1), (2, 3)), (0, 2)) and res.cost == 2


def test_approx_pipeline_equals_manual_composition():
    inst = gen_approx_kmedian(3, [8, 9, 10], 5, 2, seed=1)
    res = kmedian_approx(inst.matrix, 3, inst.epsilon, inst.min_cluster)
    T = clean_tree(approx_closure_tree(inst.matrix, ApproxParams(inst.epsilon, inst.min_cluster)),
                   inst.matrix)
    assert res.clustering == best_pruning(T, inst.matrix, 3).clustering


def test_minsum_pipeline_bounds(two_pairs):
    with pytest.raises(InputError):
        minsum_linkage(two_pairs, 2, 0)
    assert minsum_linkage(two_pairs, 2, 2).clustering.blocks == ((0, 1), (2, 3))


def test_sweep_picks_cheapest():
    inst = gen_minsum_resilient(3, [5, 6, 7], 6, seed=2)
    res = sweep_min_cluster(lambda m: minsum_linkage(inst.matrix, 3, m), inst.n)
    costs = []
    for m in range(1, inst.n + 1):
        try:
            costs.append(minsum_linkage(inst.matrix, 3, m).cost)
        except InfeasibleError:
            pass
    assert res.cost == min(costs) and res.params["swept"] == inst.n
    assert res.clustering.same_partition(inst.truth)


def test_sweep_all_infeasible(two_pairs):
    with pytest.raises(InfeasibleError):
        sweep_min_cluster(lambda m: kmedian_closure(two_pairs, 9), 4)


# --- sublinear -------------------------------------------------------------------------------

def test_sample_is_sorted_and_seeded():
    a = draw_sample(100, 10, 3)
    assert np.array_equal(a, draw_sample(100, 10, 3)) and np.all(np.diff(a) > 0)
    with pytest.raises(InputError):
        draw_sample(10, 11, 0)


def test_full_sample_reduces_to_algorithm():
    inst = gen_approx_kmedian(3, [10, 11, 12], 5, 2, seed=0)
    sub = sublinear_kmedian(inst.matrix, inst.n, 3, inst.epsilon, inst.min_cluster, seed=5)
    full = kmedian_approx(inst.matrix, 3, inst.epsilon, inst.min_cluster)
    assert sorted(sub.implicit.centers) == sorted(full.clustering.centers)
    assert sub.clustering.same_partition(full.clustering)

    m = gen_minsum_resilient(3, [6, 7, 8], 5, seed=0)
    sub = sublinear_minsum(m.matrix, m.n, 3, m.min_cluster, seed=5)
    assert sub.clustering.same_partition(minsum_linkage(m.matrix, 3, m.min_cluster).clustering)


def test_k1_sample_median_within_factor_two():
    D = random_metric(60, 1, dim=2)
    best = brute_force_kmedian(D, 1).cost
    for seed in range(5):
        res = sublinear_kmedian(D, 20, 1, 0.0, 40, seed=seed)
        assert res.clustering.k == 1
        assert res.cost <= 2 * best
    assert sublinear_minsum(D, 20, 1, 40, seed=0).clustering.k == 1


def test_sample_too_small():
    D = random_metric(50, 0)
    with pytest.raises(InputError):
        sublinear_kmedian(D, 5, 2, 0.0, 10, seed=0)
    with pytest.raises(InputError):
        sublinear_minsum(D, 5, 2, 9, seed=0)


def test_sublinear_determinism_and_json():
    inst = gen_approx_kmedian(3, [40, 50, 60], 9, 1, seed=0)
    a = sublinear_kmedian(inst.matrix, 100, 3, inst.epsilon, inst.min_cluster, seed=7)
    b = sublinear_kmedian(inst.matrix, 100, 3, inst.epsilon, inst.min_cluster, seed=7)
    assert a.implicit == b.implicit and a.clustering == b.clustering
    obj = json.loads(json.dumps(a.implicit.to_dict()))
    assert set(obj) == {"objective", "sample", "centers", "sample_blocks"}
    back = ImplicitClustering.from_dict(obj)
    assert back == a.implicit
    assert back.assign(inst.matrix) == a.clustering
    assert set(back.centers) <= set(back.sample)


def test_oracle_centers_do_not_increase_cost():
    inst = gen_approx_kmedian(3, [40, 50, 60], 9, 1, seed=1)
    for seed in range(3):
        plain = sublinear_kmedian(inst.matrix, 80, 3, inst.epsilon, inst.min_cluster, seed=seed)
        oc = sublinear_kmedian(inst.matrix, 80, 3, inst.epsilon, inst.min_cluster, seed=seed,
                               oracle_centers=True)
        assert oc.cost <= plain.cost + 1e-9


def test_implicit_rejects_unsampled_refs():
    with pytest.raises(InputError):
        ImplicitClustering(ObjectiveKind.KMEDIAN, (0, 1), centers=(2,))


def test_minsum_recovery_over_seeds():
    sizes = [40, 45, 50]
    inst = gen_minsum_resilient(3, sizes, 6 * max(sizes) / (min(sizes) - 1), seed=4)
    for seed in range(10):
        res = sublinear_minsum(inst.matrix, 60, 3, inst.min_cluster, seed=seed)
        assert clustering_distance(inst.truth, res.clustering).count == 0


def test_sample_objective_concentration():
    # the sample's average cost tracks the full average for the planted centers
    lam = 0.1
    inst = gen_approx_kmedian(4, [400, 500, 500, 600], 9, 0, seed=0)
    c = np.asarray(inst.truth.centers)
    per_point = inst.matrix.d[:, c].min(axis=1)
    full = per_point.mean()
    ok = 0
    for seed in range(50):
        s = draw_sample(inst.n, 400, seed)
        ok += abs(per_point[s].mean() - full) <= lam * full
    assert ok >= 45


def test_sample_size_helpers():
    assert kmedian_sample_size(2, 100, 1, 0.5, 0.5, 1, 0.1) == math.ceil(2 / 0.0625 * math.log(1000))
    assert minsum_sample_size(2, 100, 1, 0.5, 0.5, 0.1) == math.ceil(16 * math.log(2000))

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import matrix, random_metric
from stableclust.closure import (ball, ball_margin_check, build_neighbor_tables, closure_distance,
                                 closure_linkage_tree, closure_linkage_tree_fast)
from stableclust.errors import InputError
from stableclust.lab.checks import laminar, center_order_violations
from stableclust.lab.generators import gen_center_stable
from stableclust.lab.oracles import enumerate_prunings

ALPHA = 1 + math.sqrt(2)


def margin_oracle(d, c, r):
    n = len(d)
    for p in range(n):
        for q in range(n):
            if d[c][p] <= r < d[c][q] and not d[c][p] < d[p][q]:
                return False
    return True


def closure_oracle(d, A, B):
    """Smallest radius over centers in A u B, radii among d(c, .), covering and with margin."""
    U = list(A) + list(B)
    best = None
    for c in sorted(U):
        cover = max(d[c][x] for x in U)
        for r in sorted(set(d[c])):
            if r >= cover and margin_oracle(d, c, r):
                if best is None or r < best[0]:
                    best = (r, c)
                break
    return best


# --- ball margin -------------------------------------------------------------------------

def test_margin_full_ball_is_vacuous(line3):
    assert ball_margin_check(line3, 0, 3)


def test_margin_examples(wedge3, line3):
    assert ball_margin_check(wedge3, 0, 1)
    assert not ball_margin_check(line3, 0, 2)


def test_ball_is_closed(line3):
    assert ball(line3, 0, 2).tolist() == [0, 1]


# --- closure distance ------------------------------------------------------------------

def test_closure_distance_examples(wedge3, line3):
    pair = matrix([[0, 1], [1, 0]])
    assert closure_distance(pair, [0], [1]).value == 1
    res = closure_distance(wedge3, [0], [1])
    assert (res.value, res.center) == (1, 0)
    res = closure_distance(line3, [0], [1])
    assert (res.value, res.center) == (2, 1)
    assert res.members == (0, 1, 2)


@pytest.mark.parametrize("A,B", [([], [1]), ([0], [0, 1]), ([0], [7])])
def test_closure_distance_bad_input(wedge3, A, B):
    with pytest.raises(InputError):
        closure_distance(wedge3, A, B)


@given(st.integers(3, 9), st.integers(0, 10**6), st.data())
def test_closure_distance_matches_oracle(n, seed, data):
    D = random_metric(n, seed)
    pts = data.draw(st.permutations(range(n)))
    a = data.draw(st.integers(1, n - 1))
    b = data.draw(st.integers(1, n - a))
    A, B = pts[:a], pts[a:a + b]
    res = closure_distance(D, A, B)
    assert (res.value, res.center) == closure_oracle(D.d.tolist(), A, B)
    assert closure_distance(D, B, A).value == res.value
    assert res.center in set(A) | set(B)
    assert set(A) | set(B) <= set(res.members)
    assert res.value <= D.diameter()


# --- naive linkage ------------------------------------------------------------------------

def test_linkage_trivial_sizes():
    T = closure_linkage_tree(matrix([[0]]))
    assert T.n == 1 and not T.internal()
    T = closure_linkage_tree(matrix([[0, 2], [2, 0]]))
    assert len(T.internal()) == 1 and T.nodes[T.root].height == 2


def test_linkage_two_pairs(two_pairs):
    T = closure_linkage_tree(two_pairs)
    seq = T.partition_sequence()
    assert frozenset({frozenset({0, 1}), frozenset({2, 3})}) == seq[2]
    assert T.is_binary() and len(T.merges()) == 3
    assert T.nodes[T.merges()[-1]].height >= 10


# --- neighbor tables -------------------------------------------------------------------

def test_tables_two_points():
    t = build_neighbor_tables(matrix([[0, 1], [1, 0]]))
    assert t.L[0].tolist() == [0, 1]
    assert t.chi.tolist() == [[-1, -1], [-1, -1]]
    assert (t.chi_star == -1).all()


def test_tables_line(line3):
    # one-based chi(a,2) = 3 is chi[0, 1] = 2 here
    t = build_neighbor_tables(line3)
    assert t.L[0].tolist() == [0, 1, 2]
    assert t.chi[0, 1] == 2 and t.chi_star[0, 1] == 2
    assert t.chi[0, 0] == -1 and t.chi_star[0, 0] == -1


@given(st.integers(2, 10), st.integers(0, 10**6))
def test_tables_match_definition(n, seed):
    D = random_metric(n, seed)
    d = D.d
    t = build_neighbor_tables(D)
    for p in range(n):
        L = t.L[p]
        assert sorted(L.tolist()) == list(range(n)) and L[0] == p
        assert np.all(np.diff(d[p, L]) >= 0)
        for i in range(n):
            js = [j for j in range(i + 1, n) if d[p, L[i]] >= d[L[i], L[j]]]
            assert t.chi[p, i] == (max(js) if js else -1)
            assert t.chi_star[p, i] == max(t.chi[p, : i + 1])
            # the margin test agrees with the direct check on the closed ball
            assert t.margin_ok(p, i) == ball_margin_check(D, p, d[p, L[i]])


def test_literal_minus_one_test_rejects_full_ball():
    # chi_star never returns to -1 once set, even where the margin holds
    t = build_neighbor_tables(random_metric(12, 3))
    assert (t.chi_star[:, -1] >= 0).all()
    assert all(t.margin_ok(p, 11) for p in range(12))


# --- fast linkage ------------------------------------------------------------------------

def test_fast_trivial():
    T = closure_linkage_tree_fast(matrix([[0, 1], [1, 0]]))
    assert T.level_partitions() == closure_linkage_tree(matrix([[0, 1], [1, 0]])).level_partitions()


def test_fast_two_pairs(two_pairs):
    assert (closure_linkage_tree_fast(two_pairs).level_partitions()
            == closure_linkage_tree(two_pairs).level_partitions())


@given(st.integers(2, 20), st.integers(0, 10**6))
def test_fast_equals_naive(n, seed):
    D = random_metric(n, seed)
    fast, naive = closure_linkage_tree_fast(D), closure_linkage_tree(D)
    fast.check()
    assert fast.level_partitions() == naive.level_partitions()


def _manhattan(pts):
    pts = np.asarray(pts)
    return np.abs(pts[:, None, :] - pts[None, :, :]).sum(axis=2).astype(float)


@given(st.integers(3, 9), st.integers(0, 10**6))
def test_fast_merges_are_margin_balls_with_ties(n, seed):
    # integer distances from a small range force many ties
    rng = np.random.default_rng(seed)
    D = matrix(_manhattan(rng.integers(0, 4, size=(n, 2))))
    T = closure_linkage_tree_fast(D)
    T.check()
    for i in T.merges():
        node = T.nodes[i]
        if node is T.nodes[T.root] and T.synthetic_root:
            continue
        assert any(ball(D, c, node.height).tolist() == list(node.members)
                   and ball_margin_check(D, c, node.height) for c in node.members)


def test_conflicting_tied_balls_depend_on_order():
    # balls (1, 2) = {0..5} and (0, 2) = {0, 1, 2, 6} are both valid at height 2
    # but overlap without nesting, so the two tie orders pick different ones
    d = _manhattan([[1, 2], [2, 2], [1, 1], [3, 3], [2, 0], [3, 1], [0, 3]])
    assert ball_margin_check(d, 1, 2) and ball_margin_check(d, 0, 2)
    naive = dict(closure_linkage_tree(d).level_partitions())[2.0]
    fast = dict(closure_linkage_tree_fast(d).level_partitions())[2.0]
    assert frozenset(range(6)) in naive
    assert frozenset({0, 1, 2, 6}) in fast


@given(st.integers(2, 25), st.integers(0, 10**6))
def test_merge_heights_non_decreasing(n, seed):
    T = closure_linkage_tree_fast(random_metric(n, seed))
    h = [T.nodes[i].height for i in T.merges()]
    assert h == sorted(h)


@pytest.mark.parametrize("seed", range(8))
def test_stable_instances_give_laminar_tree_with_planted_pruning(seed):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(2, 4))
    inst = gen_center_stable(k, rng.integers(2, 5, size=k), ALPHA, seed=seed)
    assert center_order_violations(inst.matrix, inst.truth) == []
    for T in (closure_linkage_tree(inst.matrix), closure_linkage_tree_fast(inst.matrix)):
        assert laminar(T.node_sets(), inst.truth)
        prunings = enumerate_prunings(T, k)
        assert any(p.same_partition(inst.truth) for p in prunings)

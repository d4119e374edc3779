import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_metric
from stableclust.core import Clustering
from stableclust.errors import InputError
from stableclust.io import (clustering_from_json, clustering_to_json, format_matrix, parse_matrix,
                            read_instance, read_matrix, sidecar_path, write_instance, write_matrix)
from stableclust.lab.generators import gen_bad_point_fixture


@given(st.integers(0, 12), st.integers(0, 10**6))
def test_matrix_text_round_trip(n, seed):
    D = random_metric(n, seed) if n else None
    if D is None:
        assert parse_matrix("0\n").n == 0
        return
    assert np.array_equal(parse_matrix(format_matrix(D)).d, D.d)


def test_matrix_file_round_trip(tmp_path, two_pairs):
    write_matrix(tmp_path / "m.dm", two_pairs)
    assert read_matrix(tmp_path / "m.dm").d.tolist() == two_pairs.d.tolist()
    assert (tmp_path / "m.dm").read_text().splitlines()[0] == "4"


@pytest.mark.parametrize("text", ["", "2\n0 1\n1", "x\n", "2\n0 a\n1 0\n"])
def test_bad_matrix_text(text):
    with pytest.raises(InputError):
        parse_matrix(text)


def test_missing_matrix_file(tmp_path):
    with pytest.raises(InputError):
        read_matrix(tmp_path / "nope.dm")


def test_clustering_json():
    C = Clustering(((0, 1), (2,)), (1, 2))
    obj = json.loads(clustering_to_json(C, 3.5))
    assert obj == {"k": 2, "blocks": [[0, 1], [2]], "centers": [1, 2], "cost": 3.5}
    assert clustering_from_json(clustering_to_json(C)) == C
    assert json.loads(clustering_to_json(Clustering(((0,),))))["centers"] is None
    with pytest.raises(InputError):
        clustering_from_json("{")


def test_instance_round_trip(tmp_path):
    f = gen_bad_point_fixture(20, 0.1, 3, 100)
    side = write_instance(tmp_path / "fx.dm", f)
    assert side == sidecar_path(tmp_path / "fx.dm") == tmp_path / "fx.json"
    meta = json.loads(side.read_text())
    assert set(meta) == {"truth", "alpha", "epsilon", "objective", "seed", "generator"}
    g = read_instance(tmp_path / "fx.dm")
    assert g.truth == f.truth and g.alpha == 3 and g.epsilon == 0.1
    assert np.array_equal(g.matrix.d, f.matrix.d)

import json

import pytest

from stableclust.cli import main
from stableclust.core import Clustering
from stableclust.io import write_matrix
from stableclust.lab.oracles import brute_force_kmedian


def run(capsys, *argv):
    code = main(list(map(str, argv)))
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv)
    return code, json.loads(out)


@pytest.fixture
def two_pairs_file(tmp_path, two_pairs):
    p = tmp_path / "two_pairs.dm"
    write_matrix(p, two_pairs)
    return p


def test_cluster_closure(capsys, two_pairs_file, two_pairs):
    code, rec = run_json(capsys, "cluster", "kmedian-closure", "--matrix", two_pairs_file, "-k", 2)
    assert code == 0
    assert rec["clustering"]["blocks"] == [[0, 1], [2, 3]] and rec["cost"] == 2
    assert Clustering.from_dict(rec["clustering"]) == brute_force_kmedian(two_pairs, 2).clustering
    assert rec["wall_ms"] >= 0 and rec["command"][0] == "cluster"


def test_fast_and_naive_cli_agree(capsys, tmp_path):
    code, _ = run_json(capsys, "gen", "center-stable", "-k", 3, "--sizes", "5,6,7", "--alpha", 3,
                       "--out", tmp_path / "cs.dm", "--seed", 4)
    assert code == 0
    _, a = run_json(capsys, "cluster", "kmedian-closure", "--matrix", tmp_path / "cs.dm", "-k", 3)
    _, b = run_json(capsys, "cluster", "kmedian-closure-fast", "--matrix", tmp_path / "cs.dm", "-k", 3)
    assert a["clustering"] == b["clustering"]
    assert a["distance_to_truth"] == 0 and a["instance"]["generator"] == "center-stable"


def test_verify_metric_failure(capsys, tmp_path):
    p = tmp_path / "bad.dm"
    p.write_text("3\n0 1 5\n1 0 1\n5 1 0\n")
    code, rec = run_json(capsys, "verify", "metric", "--matrix", p)
    assert code == 1 and rec["triangle"] == [[0, 2, 1, 5.0, 2.0]]
    assert rec["error"] == "metric violation"


def test_verify_stability_and_resilience(capsys, tmp_path):
    run(capsys, "gen", "center-stable", "-k", 2, "--sizes", "4,4", "--alpha", 3, "--out", tmp_path / "a.dm")
    code, rec = run_json(capsys, "verify", "stability", "--matrix", tmp_path / "a.dm", "--alpha", 3)
    assert code == 0 and rec["ok"]
    code, rec = run_json(capsys, "verify", "stability", "--matrix", tmp_path / "a.dm", "--alpha", 1e6)
    assert code == 1 and rec["violation"] is not None
    code, rec = run_json(capsys, "verify", "resilience", "--matrix", tmp_path / "a.dm", "--alpha", 2,
                         "--trials", 5)
    assert code == 0 and rec["passed"] and rec["trials"] >= 5


def test_compare_oracle(capsys, tmp_path):
    run(capsys, "gen", "bad-point", "--n", 20, "--epsilon", 0.1, "--alpha", 3, "--out", tmp_path / "f.dm")
    code, rec = run_json(capsys, "cluster", "kmedian-approx", "--matrix", tmp_path / "f.dm", "-k", 2,
                         "--epsilon", 0.1, "--min-cluster", 9, "--compare-oracle")
    assert code == 0
    assert rec["oracle"]["distance"] == 0 and rec["oracle"]["cost"] == pytest.approx(rec["cost"])


def test_compare_oracle_skips_when_too_large(capsys, tmp_path):
    run(capsys, "gen", "minsum", "-k", 2, "--sizes", "7,7", "--alpha", 4, "--out", tmp_path / "m.dm")
    code, rec = run_json(capsys, "cluster", "minsum", "--matrix", tmp_path / "m.dm", "-k", 2, "--sweep",
                         "--compare-oracle")
    assert code == 0 and "skipped" in rec["oracle"] and rec["distance_to_truth"] == 0


def test_oracle_and_sample(capsys, tmp_path, two_pairs_file):
    code, rec = run_json(capsys, "oracle", "minsum", "--matrix", two_pairs_file, "-k", 2)
    assert code == 0 and rec["cost"] == 4 and rec["unique"]
    run(capsys, "gen", "minsum", "-k", 2, "--sizes", "20,22", "--alpha", 4, "--out", tmp_path / "s.dm")
    code, rec = run_json(capsys, "sample", "minsum", "--matrix", tmp_path / "s.dm", "--n", 30, "-k", 2,
                         "--min-cluster", 20, "--seed", 3)
    assert code == 0 and rec["distance_to_truth"] == 0
    assert len(rec["implicit"]["sample"]) == 30 and rec["implicit"]["centers"] is None


def test_algorithm_error_exit_one(capsys, two_pairs_file):
    code, rec = run_json(capsys, "cluster", "kmedian-closure", "--matrix", two_pairs_file, "-k", 9)
    assert code == 1 and rec["error"] == "InfeasibleError"
    code, rec = run_json(capsys, "cluster", "minsum", "--matrix", two_pairs_file, "-k", 2)
    assert code == 1


def test_missing_file_exit_one(capsys, tmp_path):
    code, rec = run_json(capsys, "oracle", "kmedian", "--matrix", tmp_path / "x.dm", "-k", 1)
    assert code == 1 and rec["error"] == "InputError"


@pytest.mark.parametrize("argv", [["cluster", "bogus", "--matrix", "x", "-k", "1"], ["frobnicate"],
                                  ["cluster", "minsum", "--matrix", "x"], ["gen", "minsum", "--alpha", "4",
                                                                           "--out", "x.dm"]])
def test_usage_errors_exit_two(argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_human_output(capsys, two_pairs_file):
    code, out = run(capsys, "cluster", "kmedian-closure", "--matrix", two_pairs_file, "-k", 2, "--human")
    assert code == 0 and out.splitlines()[1].startswith("instance")

"""Command-line front end.

Every command prints one JSON record on stdout (or a plain table with
``--human``).  Exit codes: 0 success, 1 algorithm or validation failure,
2 usage error.  Randomness comes from ``--seed`` (default 0).
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from .core import ObjectiveKind, clustering_distance, objective_cost, validate_metric
from .errors import ClusteringError, ScaleError
from .io import read_instance, read_matrix, sidecar_path, write_instance
from .lab.checks import check_center_stability
from .lab.generators import gen_bad_point_fixture, gen_center_stable, gen_minsum_resilient
from .lab.oracles import brute_force_kmedian, brute_force_minsum
from .lab.resilience import check_perturbation_resilience
from .pipeline import kmedian_approx, kmedian_closure, minsum_linkage, sweep_min_cluster
from .sublinear import sublinear_kmedian, sublinear_minsum

ALGORITHMS = ("kmedian-closure", "kmedian-closure-fast", "kmedian-approx", "minsum")


class Failure(Exception):
    """A run that completed but whose verdict is negative (exit code 1)."""

    def __init__(self, record: dict):
        super().__init__(record.get("error", "failure"))
        self.record = record


def _sizes(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _instance(path):
    """The planted instance if a sidecar exists, else just the matrix."""
    if sidecar_path(path).exists():
        inst = read_instance(path)
        return inst.matrix, inst
    return read_matrix(path), None


def _provenance(path, inst) -> dict:
    out = {"matrix": str(path)}
    if inst is not None:
        out.update(generator=inst.generator, seed=inst.seed, alpha=inst.alpha, epsilon=inst.epsilon)
    return out


def _oracle(D, k, objective):
    try:
        if objective is ObjectiveKind.KMEDIAN:
            return brute_force_kmedian(D, k)
        return brute_force_minsum(D, k)
    except ScaleError as exc:
        return str(exc)


def cmd_gen(args) -> dict:
    if args.kind == "center-stable":
        inst = gen_center_stable(args.k, args.sizes, args.alpha, args.separation, seed=args.seed)
    elif args.kind == "bad-point":
        inst = gen_bad_point_fixture(args.n, args.epsilon, args.alpha, args.M)
    else:
        inst = gen_minsum_resilient(args.k, args.sizes, args.alpha, seed=args.seed)
    side = write_instance(args.out, inst)
    return {"matrix": str(args.out), "sidecar": str(side), "n": inst.n, "k": inst.k,
            "generator": inst.generator, "seed": inst.seed, "truth": inst.truth.to_dict()}


def cmd_cluster(args) -> dict:
    D, inst = _instance(args.matrix)
    alg = args.algorithm
    objective = ObjectiveKind.MINSUM if alg == "minsum" else ObjectiveKind.KMEDIAN
    if alg in ("kmedian-closure", "kmedian-closure-fast"):
        run = lambda m: kmedian_closure(D, args.k, fast=alg.endswith("fast"))  # noqa: E731
        needs_m = False
    elif alg == "kmedian-approx":
        run = lambda m: kmedian_approx(D, args.k, args.epsilon, m)  # noqa: E731
        needs_m = True
    else:
        run = lambda m: minsum_linkage(D, args.k, m)  # noqa: E731
        needs_m = True
    if needs_m and not args.sweep and args.min_cluster is None:
        raise ClusteringError(f"{alg} needs --min-cluster or --sweep")
    if needs_m and args.sweep:
        res = sweep_min_cluster(run, D.n)
    else:
        res = run(args.min_cluster)
    record = {"instance": _provenance(args.matrix, inst), "algorithm": alg, "params": res.params,
              "clustering": res.clustering.to_dict(), "cost": res.cost}
    if inst is not None:
        record["distance_to_truth"] = clustering_distance(inst.truth, res.clustering).count
    if args.compare_oracle:
        opt = _oracle(D, args.k, objective)
        if isinstance(opt, str):
            record["oracle"] = {"skipped": opt}
        else:
            record["oracle"] = {"cost": opt.cost, "unique": opt.unique,
                                "distance": clustering_distance(opt.clustering, res.clustering).count,
                                "clustering": opt.clustering.to_dict()}
    return record


def cmd_oracle(args) -> dict:
    D, inst = _instance(args.matrix)
    objective = ObjectiveKind(args.objective)
    oracle = brute_force_kmedian if objective is ObjectiveKind.KMEDIAN else brute_force_minsum
    opt = oracle(D, args.k)
    return {"instance": _provenance(args.matrix, inst), "algorithm": f"oracle-{objective.value}",
            "clustering": opt.clustering.to_dict(), "cost": opt.cost, "unique": opt.unique}


def cmd_verify(args) -> dict:
    D, inst = _instance(args.matrix)
    if args.check == "metric":
        rep = validate_metric(D, max_violations=args.max_violations)
        record = {"instance": _provenance(args.matrix, inst), "check": "metric", **rep.to_dict()}
        if not rep.ok:
            raise Failure({"error": "metric violation", **record})
        return record
    if inst is None:
        raise ClusteringError(f"{args.check} check needs the instance sidecar {sidecar_path(args.matrix)}")
    if args.check == "stability":
        res = check_center_stability(D, inst.truth, args.alpha)
        record = {"check": "stability", "alpha": args.alpha, "ok": res.ok,
                  "violation": None if res.violation is None else list(map(int, res.violation))}
        if not res.ok:
            raise Failure({"error": "not center stable", **record})
        return record
    if args.epsilon is not None:
        inst = type(inst)(inst.matrix, inst.truth, inst.alpha, args.epsilon, inst.objective,
                          inst.generator, inst.seed, inst.extra)
    verdict = check_perturbation_resilience(inst, trials=args.trials, seed=args.seed, alpha=args.alpha)
    record = {"check": "resilience", "alpha": args.alpha, "epsilon": inst.epsilon, **verdict.to_dict()}
    if not verdict.passed:
        raise Failure({"error": "resilience refuted", **record})
    return record


def cmd_sample(args) -> dict:
    D, inst = _instance(args.matrix)
    if args.objective == "kmedian":
        res = sublinear_kmedian(D, args.n, args.k, args.epsilon, args.min_cluster, seed=args.seed,
                                oracle_centers=args.oracle_centers)
    else:
        res = sublinear_minsum(D, args.n, args.k, args.min_cluster, seed=args.seed)
    record = {"instance": _provenance(args.matrix, inst), "algorithm": f"sample-{args.objective}",
              "implicit": res.implicit.to_dict(), "sample_params": res.sample_params,
              "clustering": res.clustering.to_dict(), "cost": res.cost}
    if inst is not None:
        record["distance_to_truth"] = clustering_distance(inst.truth, res.clustering).count
        record["truth_cost"] = objective_cost(D, inst.truth, ObjectiveKind(args.objective))
    return record


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    common.add_argument("--human", action="store_true", help="print a table instead of JSON")

    ap = argparse.ArgumentParser(prog="stableclust", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", parents=[common], help="write a planted instance")
    g.add_argument("kind", choices=["center-stable", "bad-point", "minsum"])
    g.add_argument("--out", type=Path, required=True, help="matrix file; metadata goes to <stem>.json")
    g.add_argument("-k", "--k", type=int, default=2)
    g.add_argument("--sizes", type=_sizes, default=None)
    g.add_argument("--alpha", type=float, required=True)
    g.add_argument("--separation", type=float, default=None)
    g.add_argument("--n", type=int, default=None)
    g.add_argument("--epsilon", type=float, default=0.0)
    g.add_argument("--M", type=float, default=100.0)
    g.set_defaults(func=cmd_gen)

    c = sub.add_parser("cluster", parents=[common], help="run a clustering pipeline")
    c.add_argument("algorithm", choices=ALGORITHMS)
    c.add_argument("--matrix", type=Path, required=True)
    c.add_argument("-k", "--k", type=int, required=True)
    c.add_argument("--epsilon", type=float, default=0.0)
    grp = c.add_mutually_exclusive_group()
    grp.add_argument("--min-cluster", type=int, default=None)
    grp.add_argument("--sweep", action="store_true", help="try every min-cluster value, keep the cheapest")
    c.add_argument("--compare-oracle", action="store_true")
    c.set_defaults(func=cmd_cluster)

    o = sub.add_parser("oracle", parents=[common], help="exhaustive optimum")
    o.add_argument("objective", choices=[x.value for x in ObjectiveKind])
    o.add_argument("--matrix", type=Path, required=True)
    o.add_argument("-k", "--k", type=int, required=True)
    o.set_defaults(func=cmd_oracle)

    v = sub.add_parser("verify", parents=[common], help="check an instance")
    v.add_argument("check", choices=["metric", "stability", "resilience"])
    v.add_argument("--matrix", type=Path, required=True)
    v.add_argument("--alpha", type=float, default=None)
    v.add_argument("--epsilon", type=float, default=None)
    v.add_argument("--trials", type=int, default=20)
    v.add_argument("--max-violations", type=int, default=20)
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("sample", parents=[common], help="cluster a sample and extend to all points")
    s.add_argument("objective", choices=[x.value for x in ObjectiveKind])
    s.add_argument("--matrix", type=Path, required=True)
    s.add_argument("--n", type=int, required=True, help="sample size")
    s.add_argument("-k", "--k", type=int, required=True)
    s.add_argument("--epsilon", type=float, default=0.0)
    s.add_argument("--min-cluster", type=int, required=True)
    s.add_argument("--oracle-centers", action="store_true")
    s.set_defaults(func=cmd_sample)
    return ap


def _check_args(ap, args) -> None:
    if args.command == "gen":
        if args.kind in ("center-stable", "minsum") and args.sizes is None:
            ap.error(f"gen {args.kind} needs --sizes")
        if args.kind == "bad-point" and args.n is None:
            ap.error("gen bad-point needs --n")
    if args.command == "verify" and args.check != "metric" and args.alpha is None:
        ap.error(f"verify {args.check} needs --alpha")


def _human(record: dict) -> str:
    width = max((len(k) for k in record), default=0)
    lines = []
    for key, val in record.items():
        if isinstance(val, (dict, list)):
            val = json.dumps(val)
        lines.append(f"{key:<{width}}  {val}")
    return "\n".join(lines)


def _emit(record: dict, human: bool) -> None:
    print(_human(record) if human else json.dumps(record))


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    ap = build_parser()
    args = ap.parse_args(argv)
    _check_args(ap, args)
    start = time.perf_counter()
    try:
        body = args.func(args)
        code = 0
    except Failure as exc:
        body, code = exc.record, 1
    except (ClusteringError, OSError) as exc:
        body, code = {"error": type(exc).__name__, "message": str(exc)}, 1
    record = {"command": argv, **body, "wall_ms": round(1000 * (time.perf_counter() - start), 3)}
    _emit(record, args.human)
    return code


if __name__ == "__main__":
    sys.exit(main())

"""Command line entry point.

Exit codes: 0 ok, 1 relation violated, 2 input error, 3 budget failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from ..poly import poly_norm
from ..snum.numbers import KINDS, UnsupportedVariant, s_numbers
from ..snum.verify import verify_properties, verify_relations
from ..spaces import DimensionError
from ..values import BudgetExhausted, OptimizerBudget
from .generate import Shape, content_hash, gen_random
from .instance import InstanceError, load_instances, serialize_instance, serialize_instances
from .run import EXIT_BUDGET, EXIT_INPUT, EXIT_OK, EXIT_VIOLATION, RunConfig, run, write_outputs


def _budget(args) -> OptimizerBudget:
    kw = {}
    if args.starts is not None:
        kw["starts"] = args.starts
    if args.net_delta is not None:
        kw["net_delta"] = args.net_delta
    if args.tol is not None:
        kw["tolerance"] = args.tol
    return OptimizerBudget(**kw)


def _emit(records: list[dict], fmt: str, columns: list[str], out_dir: str | None, stem: str):
    if fmt == "json":
        text = json.dumps(records, indent=2, sort_keys=True) + "\n"
    else:
        lines = [",".join(columns)]
        for r in records:
            lines.append(",".join(_cell(r[c]) for c in columns))
        text = "\n".join(lines) + "\n"
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, f"{stem}.{fmt}"), "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def _value_record(name: str, kind: str, n: int, v) -> dict:
    return {"instance": name, "kind": kind, "n": n, "lo": v.lo, "hi": v.hi, "lo_cert": v.lo_certified,
            "hi_cert": v.hi_certified, "status": "ok" if v.converged else "unconverged"}


VALUE_COLUMNS = ["instance", "kind", "n", "lo", "hi", "lo_cert", "hi_cert", "status"]


def cmd_norm(args) -> int:
    budget = _budget(args)
    recs = []
    for spec in load_instances(args.instance):
        v = poly_norm(spec.to_poly(), budget, args.seed, strict=False)
        recs.append(_value_record(spec.name, "norm", 1, v))
    _emit(recs, args.format, VALUE_COLUMNS, args.out, "norm")
    return EXIT_OK if all(r["status"] == "ok" for r in recs) else EXIT_BUDGET


def cmd_snum(args) -> int:
    budget = _budget(args)
    recs = []
    for spec in load_instances(args.instance):
        res = s_numbers(spec.to_poly(), args.kind, args.n_max, budget, args.seed)
        recs.extend(_value_record(spec.name, args.kind, n, v) for n, v in res.values.items())
    _emit(recs, args.format, VALUE_COLUMNS, args.out, "snumbers")
    return EXIT_OK if all(r["status"] == "ok" for r in recs) else EXIT_BUDGET


def cmd_verify(args) -> int:
    budget = _budget(args)
    reports, ok = [], True
    for spec in load_instances(args.instance):
        P = spec.to_poly()
        rel, _ = verify_relations(P, args.n_max, budget, args.seed)
        rel.extend(verify_properties(P, args.n_max, budget, args.seed))
        reports.append({"instance": spec.name, **rel.as_dict()})
        ok = ok and rel.ok
    if args.format == "json":
        _write(json.dumps(reports, indent=2, sort_keys=True) + "\n", args.out, "verify.json")
    else:
        cols = ["instance", "name", "n", "verdict", "lhs_lo", "lhs_hi", "rhs_lo", "rhs_hi", "slack"]
        recs = [{"instance": r["instance"], "name": c["name"], "n": c["n"], "verdict": c["verdict"],
                 "lhs_lo": c["lhs"][0], "lhs_hi": c["lhs"][1], "rhs_lo": c["rhs"][0], "rhs_hi": c["rhs"][1],
                 "slack": c["slack"]} for r in reports for c in r["checks"]]
        _emit(recs, "csv", cols, args.out, "verify")
    return EXIT_OK if ok else EXIT_VIOLATION


def _write(text: str, out_dir: str | None, name: str):
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, name), "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_gen(args) -> int:
    specs = gen_random(args.seed, Shape.parse(args.shape), args.count, args.prefix)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        for s in specs:
            with open(os.path.join(args.out, f"{s.name}.yaml"), "w", encoding="utf-8") as fh:
                fh.write(serialize_instance(s))
        print(f"{len(specs)} instances, sha256 {content_hash(specs)}", file=sys.stderr)
    else:
        sys.stdout.write(serialize_instances(specs))
    return EXIT_OK


def cmd_run(args) -> int:
    cfg = RunConfig.load(args.config)
    for key in ("seed", "starts", "net_delta", "threads"):
        if getattr(args, key, None) is not None:
            setattr(cfg, key, getattr(args, key))
    if args.tol is not None:
        cfg.tolerance = args.tol
    cfg.__post_init__()
    result = run(cfg)
    write_outputs(result, args.out or cfg.out, args.format)
    return result.exit_code


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="random seed (default 0, or the config value)")
    common.add_argument("--tol", type=float, default=None, help="relative duality-gap tolerance")
    common.add_argument("--net-delta", type=float, default=None, help="sphere net mesh")
    common.add_argument("--starts", type=int, default=None, help="multistart count")
    common.add_argument("--out", default=None, help="output directory (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")

    ap = argparse.ArgumentParser(prog="snumbers", description="s-numbers of homogeneous polynomials")
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("norm", parents=[common], help="certified norm of each instance")
    p.add_argument("instance")
    p.set_defaults(func=cmd_norm)
    p = sub.add_parser("snum", parents=[common], help="s-number sequence of one kind")
    p.add_argument("instance")
    p.add_argument("--kind", choices=KINDS, default="approximation")
    p.add_argument("--n-max", type=int, default=3)
    p.set_defaults(func=cmd_snum)
    p = sub.add_parser("verify", parents=[common], help="relation and property report")
    p.add_argument("instance")
    p.add_argument("--n-max", type=int, default=3)
    p.set_defaults(func=cmd_verify)
    p = sub.add_parser("gen", parents=[common], help="seeded random instances")
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--shape", default="2x2:m2:1,2,inf", help="DxK:mM[:p,...]")
    p.add_argument("--prefix", default="rand")
    p.set_defaults(func=cmd_gen)
    p = sub.add_parser("run", parents=[common], help="experiment from a YAML config")
    p.add_argument("config")
    p.add_argument("--threads", type=int, default=None)
    p.set_defaults(func=cmd_run)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.seed is None and args.command != "run":
        args.seed = 0
    try:
        return args.func(args)
    except (InstanceError, DimensionError, UnsupportedVariant, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BudgetExhausted as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())

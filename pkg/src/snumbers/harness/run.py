"""Experiment orchestration: s-number tables, relation reports, lifting trends."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import yaml

from ..snum.lifting import DEFAULT_LIFT_SIZES, lifting_trend
from ..snum.numbers import KINDS, UnsupportedVariant, s_numbers
from ..snum.verify import verify_relations
from ..values import BudgetExhausted, OptimizerBudget
from .generate import Shape, gen_random
from .instance import InstanceSpec, load_instances

CSV_COLUMNS = ("instance", "kind", "n", "lo", "hi", "lo_cert", "hi_cert", "runtime_ms", "status")
LIFT_COLUMNS = ("instance", "n", "lift_size", "lo", "hi", "kolmogorov_hi", "norm_hi", "runtime_ms")
RUNTIME_COLUMNS = ("runtime_ms",)

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3


@dataclass
class RunConfig:
    seed: int = 0
    n_max: int = 3
    kinds: tuple[str, ...] = ("approximation", "kolmogorov", "gelfand_kappa", "gelfand_linfty")
    starts: int = 32
    net_delta: float | None = None
    max_iters: int = 500
    tolerance: float = 1e-3
    lift_sizes: tuple[int, ...] = DEFAULT_LIFT_SIZES
    relations: bool = True
    threads: int = 1
    out: str = "results"
    instances: list = field(default_factory=list)

    def __post_init__(self):
        if self.n_max < 1:
            raise ValueError("n_max must be >= 1")
        bad = [k for k in self.kinds if k not in KINDS]
        if bad:
            raise ValueError(f"unknown kinds {bad}; expected a subset of {KINDS}")
        if self.starts < 1 or self.max_iters < 1 or self.tolerance <= 0 or self.threads < 1:
            raise ValueError("budgets and thread counts must be positive")
        if self.net_delta is not None and not 0 < self.net_delta < 1:
            raise ValueError("net_delta must lie in (0, 1)")
        self.kinds = tuple(self.kinds)
        self.lift_sizes = tuple(int(s) for s in self.lift_sizes)

    @property
    def budget(self) -> OptimizerBudget:
        return OptimizerBudget(starts=self.starts, net_delta=self.net_delta, max_iters=self.max_iters,
                               tolerance=self.tolerance)

    @classmethod
    def from_dict(cls, raw: dict) -> "RunConfig":
        raw = dict(raw)
        budget = raw.pop("budget", {}) or {}
        for key in ("starts", "net_delta", "max_iters", "tolerance"):
            if key in budget:
                raw[key] = budget[key]
        known = set(cls.__dataclass_fields__)
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(sorted(unknown))}")
        return cls(**raw)

    @classmethod
    def load(cls, path) -> "RunConfig":
        with open(path, encoding="utf-8") as fh:
            raw = yaml.safe_load(fh) or {}
        cfg = cls.from_dict(raw)
        base = os.path.dirname(os.path.abspath(path))
        cfg.instances = [dict(x, file=os.path.join(base, x["file"])) if isinstance(x, dict) and "file" in x else x
                         for x in cfg.instances]
        return cfg


def resolve_instances(cfg: RunConfig) -> list[InstanceSpec]:
    out: list[InstanceSpec] = []
    for item in cfg.instances:
        if "file" in item:
            out.extend(load_instances(item["file"]))
        elif "generate" in item:
            g = item["generate"]
            out.extend(gen_random(int(g.get("seed", cfg.seed)), Shape.parse(str(g["shape"])), int(g["count"]),
                                  g.get("prefix", "rand")))
        else:
            raise ValueError(f"instance entry {item!r} needs 'file' or 'generate'")
    return out


@dataclass
class InstanceResult:
    name: str
    rows: list[dict]
    relations: dict | None
    lifting: list[dict]
    violated: bool
    budget_failed: bool


@dataclass
class RunResult:
    instances: list[InstanceResult]

    @property
    def exit_code(self) -> int:
        if any(r.violated for r in self.instances):
            return EXIT_VIOLATION
        if any(r.budget_failed for r in self.instances):
            return EXIT_BUDGET
        return EXIT_OK

    @property
    def rows(self) -> list[dict]:
        return [row for r in self.instances for row in r.rows]

    @property
    def lifting_rows(self) -> list[dict]:
        return [row for r in self.instances for row in r.lifting]


def _num(v: float) -> str:
    return "nan" if v is None or (isinstance(v, float) and math.isnan(v)) else format(float(v), ".17g")


def _status(v) -> str:
    return "ok" if v.converged else "unconverged"


def run_instance(spec: InstanceSpec, cfg: RunConfig) -> InstanceResult:
    """Pure function of (instance, config); safe to run concurrently."""
    P = spec.to_poly()
    budget = cfg.budget
    rows, failed = [], False
    for kind in cfg.kinds:
        t0 = time.perf_counter()
        try:
            res = s_numbers(P, kind, cfg.n_max, budget, cfg.seed)
        except UnsupportedVariant:
            continue
        except BudgetExhausted:
            failed = True
            for n in range(1, cfg.n_max + 1):
                rows.append({"instance": spec.name, "kind": kind, "n": n, "lo": math.nan, "hi": math.nan,
                             "lo_cert": False, "hi_cert": False,
                             "runtime_ms": 1e3 * (time.perf_counter() - t0), "status": "budget"})
            continue
        for n, v in res.values.items():
            rows.append({"instance": spec.name, "kind": kind, "n": n, "lo": v.lo, "hi": v.hi,
                         "lo_cert": v.lo_certified, "hi_cert": v.hi_certified,
                         "runtime_ms": res.runtime_ms[n], "status": _status(v)})
    relations, violated = None, False
    if cfg.relations:
        try:
            rep, vals = verify_relations(P, cfg.n_max, budget, cfg.seed)
            relations = {"instance": spec.name, **rep.as_dict(),
                         "pi_s_gaps": {k: {str(n): g for n, g in d.items()} for k, d in vals.pi_gaps.items()}}
            violated = not rep.ok
        except BudgetExhausted as exc:
            failed = True
            relations = {"instance": spec.name, "ok": None, "error": str(exc), "checks": []}
    lifting = []
    if cfg.lift_sizes and P.domain.dim == 2:
        for n in range(1, cfg.n_max + 1):
            tr = lifting_trend(P, n, cfg.lift_sizes, budget, cfg.seed)
            for r in tr.results:
                lifting.append({"instance": spec.name, "n": n, "lift_size": r.size, "lo": r.value.lo,
                                "hi": r.value.hi, "kolmogorov_hi": tr.kolmogorov.hi, "norm_hi": tr.norm.hi,
                                "runtime_ms": r.runtime_ms})
    return InstanceResult(spec.name, rows, relations, lifting, violated, failed)


def run(cfg: RunConfig, instances: list[InstanceSpec] | None = None) -> RunResult:
    """Process instances (concurrently when threads > 1); results keep input order."""
    specs = resolve_instances(cfg) if instances is None else list(instances)
    if cfg.threads == 1 or len(specs) <= 1:
        results = [run_instance(s, cfg) for s in specs]
    else:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            results = list(pool.map(lambda s: run_instance(s, cfg), specs))
    return RunResult(results)


def _csv_text(rows: list[dict], columns, drop=()) -> str:
    cols = [c for c in columns if c not in drop]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for row in rows:
        out = []
        for c in cols:
            v = row[c]
            if isinstance(v, bool):
                out.append("true" if v else "false")
            elif isinstance(v, float):
                out.append(format(v, ".3f") if c == "runtime_ms" else _num(v))
            else:
                out.append(str(v))
        w.writerow(out)
    return buf.getvalue()


def snumber_csv(result: RunResult, include_runtime: bool = True) -> str:
    return _csv_text(result.rows, CSV_COLUMNS, () if include_runtime else RUNTIME_COLUMNS)


def lifting_csv(result: RunResult, include_runtime: bool = True) -> str:
    return _csv_text(result.lifting_rows, LIFT_COLUMNS, () if include_runtime else RUNTIME_COLUMNS)


def relations_json(result: RunResult) -> str:
    reports = [r.relations for r in result.instances if r.relations is not None]
    return json.dumps(reports, indent=2, sort_keys=True, allow_nan=True) + "\n"


def write_outputs(result: RunResult, out_dir, fmt: str = "csv") -> list[str]:
    os.makedirs(out_dir, exist_ok=True)
    written = []
    if fmt == "csv":
        files = {"snumbers.csv": snumber_csv(result), "lifting.csv": lifting_csv(result)}
    elif fmt == "json":
        files = {"snumbers.json": json.dumps(result.rows, indent=2, sort_keys=True, allow_nan=True) + "\n",
                 "lifting.json": json.dumps(result.lifting_rows, indent=2, sort_keys=True, allow_nan=True) + "\n"}
    else:
        raise ValueError(f"unknown format {fmt!r}")
    files["relations.json"] = relations_json(result)
    for name, text in files.items():
        path = os.path.join(out_dir, name)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
        written.append(path)
    return written

"""Acceptance criteria; each prints one PASS/FAIL line (run with -s to see them)."""

from __future__ import annotations

import hashlib
import os
import time

import numpy as np
import pytest

from snumbers import HomPoly, LinearMap, LpSpace, Vector
from snumbers.harness import RunConfig, Shape, gen_random, lifting_csv, relations_json, run, snumber_csv
from snumbers.oracle import svd_singular_values
from snumbers.poly import poly_norm
from snumbers.snum import approx_number, clear_caches, gelfand_number, kolmogorov_number, s_number
from snumbers.snum.lifting import lifting_trend
from snumbers.snum.verify import rank_r_poly, verify_axioms
from snumbers.spaces import ALLOWED_P, lp_norm, random_unit_vectors
from snumbers.tensor import delta, pi_s_norm
from snumbers.values import relation_slack

DATA = os.path.join(os.path.dirname(__file__), "data")
CONFIG = os.path.join(DATA, "acceptance.yaml")
EQ_TOL = 5e-2


def report(k: int, ok: bool, what: str, seconds: float, limit: float | None):
    ok = ok and (limit is None or seconds <= limit)
    budget = f" / {limit:.0f}s" if limit is not None else ""
    print(f"\n{'PASS' if ok else 'FAIL'} criterion {k}: {what} [{seconds:.1f}s{budget}]")
    return ok


@pytest.fixture(scope="module")
def acceptance_run():
    clear_caches()
    cfg = RunConfig.load(CONFIG)
    t0 = time.perf_counter()
    result = run(cfg)
    return result, time.perf_counter() - t0


def _norms(result) -> dict:
    """|P| per instance: the first approximation number."""
    return {r["instance"]: r["hi"] for r in result.rows if r["kind"] == "approximation" and r["n"] == 1}


def _checks(result, prefix: str):
    return [(r.name, c) for r in result.instances for c in r.relations["checks"] if c["name"].startswith(prefix)]


# 1 ---------------------------------------------------------------------------------

def test_hilbert_linear_ground_truth():
    t0 = time.perf_counter()
    H = LpSpace(3, 2.0)
    worst = 0.0
    for i in range(20):
        A = np.random.default_rng(1000 + i).uniform(-1.0, 1.0, (3, 3))
        sigma = svd_singular_values(LinearMap(H, H, A))
        P = HomPoly(1, H, H, A)
        for n in range(1, 4):
            for v in (approx_number(P, n), kolmogorov_number(P, n), gelfand_number(P, n, "subspace")):
                worst = max(worst, abs(v.hi - sigma[n - 1]) / max(sigma[n - 1], 1e-12))
    ok = report(1, worst <= 1e-3, f"20 Hilbert operators vs SVD, worst relative error {worst:.2e}",
                time.perf_counter() - t0, 120)
    assert ok


# 2 ---------------------------------------------------------------------------------

def axiom_pairs(count: int = 10):
    specs = gen_random(31, Shape(2, 2, 2), count, "axiom")
    pairs = []
    for i, s in enumerate(specs):
        P = s.to_poly()
        Q = P.with_coeffs(np.random.default_rng(500 + i).uniform(-1.0, 1.0, P.coeffs.shape))
        pairs.append((P, Q))
    return pairs


def test_axiom_suite():
    t0 = time.perf_counter()
    pairs = axiom_pairs()
    bad, total, s5 = [], 0, 0
    for kind in ("approximation", "kolmogorov", "gelfand_kappa", "gelfand_linfty"):
        rep = verify_axioms(pairs, kind, n_max=3)
        total += len(rep.checks)
        s5 += sum(c.passed for c in rep.by_name("S5"))
        bad += [(kind, c.name, c.n) for c in rep.violations]
    ok = report(2, not bad, f"S1-S5 on 10 pairs x 4 kinds: {total} checks, {s5} exact S5 checks, "
                            f"violations {bad[:3]}", time.perf_counter() - t0, 600)
    assert ok


# 3 ---------------------------------------------------------------------------------

def test_linearization_transfer(acceptance_run):
    result, secs = acceptance_run
    checks = _checks(result, "linearization")
    worst = max(c["residual"] for _, c in checks)
    norms = _norms(result)
    rel = max(c["residual"] / norms[name] for name, c in checks)
    gaps = [g for r in result.instances for d in r.relations["pi_s_gaps"].values() for g in d.values()]
    ok = all(c["verdict"] == "PASS" for _, c in checks) and rel <= EQ_TOL and max(gaps) <= 1e-3
    ok = report(3, ok, f"{len(checks)} transfer checks, worst |diff|/|P| {rel:.2e} (abs {worst:.2e}), "
                       f"max pi_s gap {max(gaps):.2e}", secs, 900)
    assert ok


# 4 ---------------------------------------------------------------------------------

def test_adjoint_duality(acceptance_run):
    result, secs = acceptance_run
    le = _checks(result, "adjoint a_n(P*)<=a_n(P)") + _checks(result, "a_n(P)<=5a_n(P*)")
    eq = _checks(result, "adjoint a_n(P*)=a_n(P)")
    norms = _norms(result)
    rel = max(c["residual"] / norms[name] for name, c in eq)
    ok = all(c["verdict"] == "PASS" for _, c in le + eq) and rel <= EQ_TOL
    ok = report(4, ok, f"{len(le)} inequalities PASS, equality worst |diff|/|P| {rel:.2e}", secs, 900)
    assert ok


# 5 ---------------------------------------------------------------------------------

def test_gelfand_kolmogorov_relations(acceptance_run):
    result, secs = acceptance_run
    ineq = _checks(result, "(i) ") + _checks(result, "(iii) ")
    rec = _checks(result, "(ii) ")
    norms = _norms(result)
    summary = []
    for var in ("kappa", "linfty"):
        mine = [(name, c) for name, c in rec if c["name"].endswith(f"({var})")]
        worst = max(c["residual"] / norms[name] for name, c in mine)
        within = sum(c["residual"] <= EQ_TOL * norms[name] + c["slack"] for name, c in mine)
        summary.append(f"{var}: {within}/{len(mine)} within, worst {worst:.2e}")
    variants = {c["name"].rsplit("(", 1)[1] for _, c in ineq}
    ok = (all(c["verdict"] == "PASS" for _, c in ineq) and variants == {"kappa)", "linfty)"}
          and all(c["verdict"] == "RECORDED" for _, c in rec))
    ok = report(5, ok, f"(i),(iii) {len(ineq)} PASS; (ii) recorded " + "; ".join(summary), secs, 900)
    assert ok


# 6 ---------------------------------------------------------------------------------

def test_lifting_trend():
    t0 = time.perf_counter()
    specs = gen_random(77, Shape(2, 2, 2, (2.0,)), 5, "lift")
    bad, worst_gap = [], 0.0
    for s in specs:
        P = s.to_poly()
        for n in (1, 2):
            tr = lifting_trend(P, n, (8, 16, 32, 64))
            for r in tr.results:
                if r.value.hi > tr.kolmogorov.hi + relation_slack(r.value, tr.kolmogorov):
                    bad.append((s.name, n, r.size))
            gap = tr.gap_at(64) / tr.norm.hi
            worst_gap = max(worst_gap, gap)
            if gap > 0.1:
                bad.append((s.name, n, "gap"))
    ok = report(6, not bad, f"a_n(PQ_N) <= d_n(P) + slack for N in 8..64, worst gap at 64 "
                            f"{worst_gap:.2e}|P|, failures {bad[:3]}", time.perf_counter() - t0, 1200)
    assert ok


# 7 ---------------------------------------------------------------------------------

def test_rank_and_norm_identities():
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    worst_rank = 0.0
    for p in ALLOWED_P:
        for q in ALLOWED_P:
            R = rank_r_poly(rng, 2, LpSpace(2, p), LpSpace(2, q), 1)
            for kind in ("approximation", "kolmogorov", "gelfand_kappa", "gelfand_linfty"):
                worst_rank = max(worst_rank, s_number(R, 2, kind).hi)
    misses = []
    for s in gen_random(20261015, Shape(2, 2, 2), 9, "accept"):
        P = s.to_poly()
        nrm = poly_norm(P, strict=False)
        for kind in ("approximation", "kolmogorov", "gelfand_kappa", "gelfand_linfty"):
            v = s_number(P, 1, kind)
            if not v.intersects(nrm, relation_slack(v, nrm)):
                misses.append((s.name, kind))
    worst_pi = 0.0
    for i in range(20):
        p, m, d = ALLOWED_P[i % 3], 2 + (i // 3) % 2, 2 + (i // 6) % 2
        X = LpSpace(d, p)
        x = random_unit_vectors(X, 1, np.random.default_rng(300 + i))[0] * (0.5 + 0.1 * i)
        v, _ = pi_s_norm(delta(Vector(X, x), m))
        exact = float(lp_norm(x, p)) ** m
        worst_pi = max(worst_pi, abs(v.hi - exact) / exact, abs(v.lo - exact) / exact)
    ok = worst_rank <= 1e-6 and not misses and worst_pi <= 1e-3
    ok = report(7, ok, f"rank-1 s_2 max {worst_rank:.1e}, s_1/norm misses {misses[:3]}, "
                       f"pi_s(delta(x)) worst rel {worst_pi:.1e}", time.perf_counter() - t0, 120)
    assert ok


# 8 ---------------------------------------------------------------------------------

def test_reproducibility(acceptance_run):
    first, _ = acceptance_run
    t0 = time.perf_counter()
    clear_caches()
    cfg = RunConfig.load(CONFIG)
    cfg.threads = 4
    second = run(cfg)
    same = (snumber_csv(first, include_runtime=False) == snumber_csv(second, include_runtime=False)
            and lifting_csv(first, include_runtime=False) == lifting_csv(second, include_runtime=False)
            and relations_json(first) == relations_json(second))
    rows = len(first.rows)
    text = snumber_csv(first, include_runtime=False) + lifting_csv(first, include_runtime=False)
    digest = hashlib.sha256(text.encode()).hexdigest()
    with open(os.path.join(DATA, "acceptance_report.sha256"), encoding="utf-8") as fh:
        golden = fh.read().strip()
    ok = report(8, same and rows > 0 and digest == golden,
                f"1 vs 4 threads: {rows} rows byte-identical (runtime excluded), "
                f"report hash {'matches' if digest == golden else 'differs from'} the golden {golden[:12]}",
                time.perf_counter() - t0, None)
    assert ok

"""Verifiers for the s-number axioms, the properties (J), (S), (M) and the
relations between the polynomial, adjoint and linearized s-numbers.

Every inequality small <= large is judged direction-safely: the certified
upper endpoint of the smaller side against the upper endpoint of the larger
side plus slack = max(1e-6, 2 x the summed interval gaps).  A true relation
therefore never fails from certification gaps alone.  Identities that only
hold approximately at desk scale are compared with an explicit tolerance,
and identities whose intended reading is ambiguous are recorded without a
verdict.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..oracle import svd_singular_values
from ..poly import HomPoly, LinearMap, compose, poly_norm
from ..spaces import ALLOWED_P, LpSpace
from ..values import DEFAULT_BUDGET, CertifiedValue, OptimizerBudget, relation_slack
from .adjoint import snumbers_of_adjoint
from .linearized import linearized_number
from .numbers import approx_number, gelfand_number, kolmogorov_number, s_number, s_numbers

PASS, VIOLATED, RECORDED = "PASS", "VIOLATED", "RECORDED"


@dataclass
class Check:
    name: str
    verdict: str
    lhs: CertifiedValue
    rhs: CertifiedValue
    slack: float
    n: int | None = None
    detail: str = ""
    residual: float | None = None
    within: bool | None = None

    @property
    def passed(self) -> bool:
        return self.verdict != VIOLATED

    def as_dict(self) -> dict:
        d = {"name": self.name, "n": self.n, "verdict": self.verdict, "slack": self.slack,
             "lhs": [self.lhs.lo, self.lhs.hi], "rhs": [self.rhs.lo, self.rhs.hi], "detail": self.detail}
        if self.residual is not None:
            d["residual"] = self.residual
            d["within"] = self.within
        return d


@dataclass
class Report:
    checks: list[Check] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def violations(self) -> list[Check]:
        return [c for c in self.checks if c.verdict == VIOLATED]

    def by_name(self, prefix: str) -> list[Check]:
        return [c for c in self.checks if c.name.startswith(prefix)]

    def passed(self, prefix: str) -> bool:
        found = self.by_name(prefix)
        return bool(found) and all(c.passed for c in found)

    def extend(self, other: "Report") -> "Report":
        self.checks.extend(other.checks)
        return self

    def as_dict(self) -> dict:
        return {"ok": self.ok, "checks": [c.as_dict() for c in self.checks]}


# --- interval helpers -------------------------------------------------------------

def interval_product(*vals: CertifiedValue) -> CertifiedValue:
    lo = math.prod(max(v.lo, 0.0) for v in vals)
    hi = math.prod(v.hi for v in vals)
    return CertifiedValue(lo, hi, all(v.lo_certified for v in vals), all(v.hi_certified for v in vals))


def interval_sum(*vals: CertifiedValue) -> CertifiedValue:
    return CertifiedValue(sum(v.lo for v in vals), sum(v.hi for v in vals),
                          all(v.lo_certified for v in vals), all(v.hi_certified for v in vals))


def check_le(name: str, small: CertifiedValue, large: CertifiedValue, n: int | None = None,
             detail: str = "", assert_it: bool = True) -> Check:
    slack = relation_slack(small, large)
    ok = small.hi <= large.hi + slack
    verdict = (PASS if ok else VIOLATED) if assert_it else RECORDED
    return Check(name, verdict, small, large, slack, n, detail, residual=max(0.0, small.hi - large.hi), within=ok)


def check_close(name: str, x: CertifiedValue, y: CertifiedValue, tol: float, n: int | None = None,
                detail: str = "", assert_it: bool = True) -> Check:
    """|x.hi - y.hi| <= tol (+ slack); recorded without a verdict when not asserted."""
    slack = relation_slack(x, y)
    res = abs(x.hi - y.hi)
    within = res <= tol + slack
    verdict = (PASS if within else VIOLATED) if assert_it else RECORDED
    return Check(name, verdict, x, y, slack, n, detail, residual=res, within=within)


# --- axioms -------------------------------------------------------------------------

SFunc = Callable[[HomPoly, int, str, OptimizerBudget, int], CertifiedValue]


def _random_linear(rng: np.random.Generator, domain: LpSpace, dim_out: int, p_out: float) -> LinearMap:
    return LinearMap(domain, LpSpace(dim_out, p_out), rng.uniform(-1.0, 1.0, (dim_out, domain.dim)))


def rank_r_poly(rng: np.random.Generator, degree: int, domain: LpSpace, codomain: LpSpace, r: int) -> HomPoly:
    """sum_{i<r} q_i(x) y_i with random scalar q_i and vectors y_i."""
    from ..monomials import num_monomials

    D = num_monomials(domain.dim, degree)
    Y = rng.uniform(-1.0, 1.0, (codomain.dim, r))
    Z = rng.uniform(-1.0, 1.0, (r, D))
    return HomPoly(degree, domain, codomain, Y @ Z)


def verify_axioms(samples: list[tuple[HomPoly, HomPoly]], kind: str, budget: OptimizerBudget = DEFAULT_BUDGET,
                  seed: int = 0, n_max: int = 3, func: SFunc | None = None, s5_dims=(1, 2, 3)) -> Report:
    """(S1)-(S4) on each pair, (S5) on identities of l_2^d against the SVD oracle.

    ``func`` replaces the s-number evaluation (negative controls).
    """
    if not samples:
        raise ValueError("samples must be nonempty")
    func = func or s_number
    rep = Report()
    rng = np.random.default_rng(seed)
    for i, (P, Q) in enumerate(samples):
        if P.domain != Q.domain or P.codomain != Q.codomain or P.degree != Q.degree:
            raise ValueError("sample pairs must share spaces and degree")
        tag = f"[{i}]"
        sP = s_numbers(P, kind, n_max, budget, seed, func=func, cummin=False)
        sQ = s_numbers(Q, kind, n_max, budget, seed, func=func, cummin=False)
        nrm = poly_norm(P, budget, seed, strict=False)
        # S1: s_1 is the norm and the sequence is nonincreasing
        s1 = sP[1]
        ok = s1.intersects(nrm, relation_slack(s1, nrm))
        rep.checks.append(Check("S1 norm" + tag, PASS if ok else VIOLATED, s1, nrm, relation_slack(s1, nrm), 1))
        for n in range(1, n_max):
            rep.checks.append(check_le("S1 monotone" + tag, sP[n + 1], sP[n], n + 1))
        # S2: additivity
        sPQ = s_numbers(P + Q, kind, n_max, budget, seed, func=func, cummin=False)
        for k in range(1, n_max + 1):
            for n in range(1, n_max + 2 - k):
                rep.checks.append(check_le("S2 additivity" + tag, sPQ[k + n - 1], interval_sum(sP[k], sQ[n]),
                                           k + n - 1, f"k={k}, n={n}"))
        # S3: ideal property with random S, T
        T = _random_linear(rng, LpSpace(P.domain.dim, float(rng.choice(ALLOWED_P))), P.domain.dim, P.domain.p)
        S = _random_linear(rng, P.codomain, P.codomain.dim, float(rng.choice(ALLOWED_P)))
        SPT = compose(S, P, T)
        sSPT = s_numbers(SPT, kind, n_max, budget, seed, func=func, cummin=False)
        nS, nT = S.norm_value(), T.norm_value()
        for n in range(1, n_max + 1):
            rhs = interval_product(nS, sP[n], *([nT] * P.degree))
            rep.checks.append(check_le("S3 ideal" + tag, sSPT[n], rhs, n))
        # S4: rank property
        for n in range(2, n_max + 1):
            r = n - 1
            if r > min(P.codomain.dim, P.num_monomials):
                continue
            R = rank_r_poly(rng, P.degree, P.domain, P.codomain, r)
            v = func(R, n, kind, budget, seed)
            rep.checks.append(check_le("S4 rank" + tag, v, CertifiedValue.zero("rank < n"), n, f"rank {r}"))
    # S5: identities on l_2^d
    for d in s5_dims:
        space = LpSpace(d, 2.0)
        Id = HomPoly(1, space, space, np.eye(d))
        sigma = svd_singular_values(LinearMap(space, space, np.eye(d)))
        for k in range(1, d + 1):
            v = func(Id, k, kind, budget, seed)
            exact = CertifiedValue.exact(float(sigma[k - 1]), "svd oracle")
            ok = abs(v.hi - exact.hi) <= 1e-9 and v.lo <= exact.hi + 1e-9
            rep.checks.append(Check(f"S5 identity[d={d}]", PASS if ok else VIOLATED, v, exact, 1e-9, k))
    return rep


# --- properties (J), (S), (M) ---------------------------------------------------------

def _pad_codomain(P: HomPoly) -> HomPoly:
    """j o P with j the zero-padding isometry Y -> l_q^{k+1}."""
    k = P.codomain.dim
    j = LinearMap(P.codomain, LpSpace(k + 1, P.codomain.p), np.vstack([np.eye(k), np.zeros((1, k))]))
    return compose(j, P, None)


def _extend_domain(P: HomPoly) -> HomPoly:
    """P o q with q: l_p^{d+1} -> l_p^d dropping the last coordinate (a metric surjection)."""
    d = P.domain.dim
    q = LinearMap(LpSpace(d + 1, P.domain.p), P.domain, np.hstack([np.eye(d), np.zeros((d, 1))]))
    return compose(None, P, q)


def verify_properties(P: HomPoly, n_max: int = 3, budget: OptimizerBudget = DEFAULT_BUDGET, seed: int = 0,
                      tol: float = 0.0, variants=("kappa", "linfty")) -> Report:
    """(S) for the Kolmogorov numbers, (J) for the Gelfand numbers, (M) for all families.

    Agreement checks use tol + combined gaps; tol defaults to 0.
    """
    rep = Report()
    rng = np.random.default_rng(seed + 101)
    Pq = _extend_domain(P)
    for n in range(1, n_max + 1):
        rep.checks.append(check_close("S surjectivity (kolmogorov)", kolmogorov_number(Pq, n, budget, seed),
                                      kolmogorov_number(P, n, budget, seed), tol, n))
    jP = _pad_codomain(P)
    for var in variants:
        if var == "linfty" and P.codomain.p == 2.0 and P.codomain.dim + 1 > 2:
            # the norming net of the padded Euclidean codomain is a sphere net of thousands of functionals
            continue
        for n in range(1, n_max + 1):
            rep.checks.append(check_close(f"J injectivity (gelfand_{var})", gelfand_number(jP, n, var, budget, seed),
                                          gelfand_number(P, n, var, budget, seed), tol, n))
    u = LinearMap(P.codomain, LpSpace(P.codomain.dim, float(rng.choice(ALLOWED_P))),
                  rng.uniform(-1.0, 1.0, (P.codomain.dim, P.codomain.dim)))
    uP = compose(u, P, None)
    uL = u.as_poly()
    for kind in ("approximation", "kolmogorov") + tuple(f"gelfand_{v}" for v in variants):
        for k in range(1, n_max + 1):
            for n in range(1, n_max + 2 - k):
                lhs = s_number(uP, k + n - 1, kind, budget, seed)
                rhs = interval_product(s_number(uL, k, kind, budget, seed), s_number(P, n, kind, budget, seed))
                rep.checks.append(check_le(f"M multiplicativity ({kind})", lhs, rhs, k + n - 1, f"k={k}, n={n}"))
    return rep


# --- relations ----------------------------------------------------------------------------

@dataclass
class RelationValues:
    """All quantities entering the relation checks, for reporting."""

    approx: dict[int, CertifiedValue] = field(default_factory=dict)
    kolmogorov: dict[int, CertifiedValue] = field(default_factory=dict)
    gelfand: dict[str, dict[int, CertifiedValue]] = field(default_factory=dict)
    adjoint: dict[str, dict[int, CertifiedValue]] = field(default_factory=dict)
    linearized: dict[str, dict[int, CertifiedValue]] = field(default_factory=dict)
    pi_gaps: dict[str, dict[int, float]] = field(default_factory=dict)


def verify_relations(P: HomPoly, n_max: int = 3, budget: OptimizerBudget = DEFAULT_BUDGET, seed: int = 0,
                     eq_tol: float | None = None, variants=("kappa", "linfty"), mixed: bool = True,
                     linearized: bool = True) -> tuple[Report, RelationValues]:
    """Evaluate every relation for n = 1..n_max.

    ``eq_tol`` is the tolerance of the approximate identities (default
    5e-2 |P|).  The identity between Gelfand numbers and Kolmogorov numbers
    of the adjoint is recorded per variant without a verdict.
    """
    rep = Report()
    vals = RelationValues()
    nrm = poly_norm(P, budget, seed, strict=False)
    tol = 5e-2 * nrm.hi if eq_tol is None else eq_tol
    for n in range(1, n_max + 1):
        a = vals.approx[n] = approx_number(P, n, budget, seed)
        d = vals.kolmogorov[n] = kolmogorov_number(P, n, budget, seed)
        aA = vals.adjoint.setdefault("approximation", {})[n] = snumbers_of_adjoint(P, n, "approximation", budget, seed)
        dA = vals.adjoint.setdefault("kolmogorov", {})[n] = snumbers_of_adjoint(P, n, "kolmogorov", budget, seed)
        rep.checks.append(check_le("d<=a", d, a, n))
        rep.checks.append(check_le("adjoint a_n(P*)<=a_n(P)", aA, a, n))
        rep.checks.append(check_close("adjoint a_n(P*)=a_n(P)", a, aA, tol, n))
        rep.checks.append(check_le("a_n(P)<=5a_n(P*)", a, aA.scaled(5.0), n))
        for var in variants:
            c = vals.gelfand.setdefault(var, {})[n] = gelfand_number(P, n, var, budget, seed)
            cA = vals.adjoint.setdefault(f"gelfand_{var}", {})[n] = snumbers_of_adjoint(P, n, f"gelfand_{var}",
                                                                                        budget, seed)
            rep.checks.append(check_le(f"c<=a ({var})", c, a, n))
            rep.checks.append(check_le(f"(i) c_n(P*)<=d_n(P) ({var})", cA, d, n))
            rep.checks.append(check_close(f"(ii) c_n(P)=d_n(P*) ({var})", c, dA, tol, n, assert_it=False))
            rep.checks.append(check_le(f"(iii) c_n(P)<=2sqrt(n)c_n(P*) ({var})", c, cA.scaled(2.0 * math.sqrt(n)), n))
        if linearized:
            for kind, own in (("approximation", a), ("kolmogorov", d)):
                lr = linearized_number(P, n, kind, budget, seed)
                vals.linearized.setdefault(kind, {})[n] = lr.value
                vals.pi_gaps.setdefault(kind, {})[n] = lr.max_pi_gap
                rep.checks.append(check_close(f"linearization {kind}", own, lr.value, tol, n,
                                              f"max pi_s gap {lr.max_pi_gap:.3g}"))
    if mixed:
        rep.extend(_mixed_estimates(P, n_max, budget, seed, vals, variants))
    return rep, vals


def _mixed_estimates(P: HomPoly, n_max: int, budget: OptimizerBudget, seed: int, vals: RelationValues,
                     variants) -> Report:
    """Estimates for S o P with a random linear S: Y -> Z."""
    rep = Report()
    rng = np.random.default_rng(seed + 202)
    S = LinearMap(P.codomain, LpSpace(P.codomain.dim, float(rng.choice(ALLOWED_P))),
                  rng.uniform(-1.0, 1.0, (P.codomain.dim, P.codomain.dim)))
    SP = compose(S, P, None)
    SL = S.as_poly()
    s1 = S.norm_value()
    kinds = ("approximation", "kolmogorov") + tuple(f"gelfand_{v}" for v in variants)
    for k in range(1, n_max + 1):
        aS = approx_number(SL, k, budget, seed)
        dS = kolmogorov_number(SL, k, budget, seed)
        cS = gelfand_number(SL, k, "subspace", budget, seed)
        for n in range(1, n_max + 2 - k):
            j = k + n - 1
            lab = f"k={k}, n={n}"
            for kind in kinds:
                lhs = s_number(SP, j, kind, budget, seed)
                sn = s_number(P, n, kind, budget, seed)
                rep.checks.append(check_le(f"mixed s(SP)<=|S|a_n(P) ({kind})", lhs,
                                           interval_product(s1, vals.approx[n]), j, lab))
                rep.checks.append(check_le(f"mixed s(SP)<=a_k(S)s_n(P) ({kind})", lhs,
                                           interval_product(aS, sn), j, lab))
                if kind.startswith("gelfand"):
                    # needs an injective sequence; the bidual variant collapses to a_n
                    rep.checks.append(check_le(f"mixed s(SP)<=c_k(S)s_n(P) ({kind})", lhs,
                                               interval_product(cS, sn), j, lab, assert_it=kind != "gelfand_kappa"))
            dSP = s_number(SP, j, "kolmogorov", budget, seed)
            rep.checks.append(check_le("largest surjective d(SP)<=d_k(S)d_n(P)", dSP,
                                       interval_product(dS, vals.kolmogorov[n]), j, lab))
    return rep

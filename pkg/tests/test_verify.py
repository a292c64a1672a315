from __future__ import annotations

import numpy as np
import pytest

from conftest import random_poly
from snumbers.snum import s_number
from snumbers.snum.verify import (
    PASS,
    RECORDED,
    VIOLATED,
    check_close,
    check_le,
    interval_product,
    interval_sum,
    rank_r_poly,
    verify_axioms,
    verify_properties,
    verify_relations,
)
from snumbers.spaces import LpSpace
from snumbers.values import CertifiedValue


def cv(lo, hi):
    return CertifiedValue(lo, hi, True, True)


def test_interval_arithmetic():
    p = interval_product(cv(1, 2), cv(3, 4))
    s = interval_sum(cv(1, 2), cv(3, 4))
    assert (p.lo, p.hi) == (3, 8) and (s.lo, s.hi) == (4, 6)


def test_check_le_uses_direction_safe_endpoints():
    assert check_le("x", cv(1.0, 1.0), cv(1.0, 1.0 + 1e-9)).verdict == PASS
    # gaps enter the slack: small.hi may exceed large.hi by at most twice the summed gaps
    assert check_le("x", cv(0.9, 1.1), cv(0.95, 1.0)).verdict == PASS
    bad = check_le("x", cv(1.5, 1.5), cv(1.0, 1.0))
    assert bad.verdict == VIOLATED and bad.residual == pytest.approx(0.5)
    assert check_le("x", cv(1.5, 1.5), cv(1.0, 1.0), assert_it=False).verdict == RECORDED


def test_check_close():
    c = check_close("eq", cv(1.0, 1.0), cv(1.02, 1.02), 0.05)
    assert c.verdict == PASS and c.within
    c = check_close("eq", cv(1.0, 1.0), cv(1.2, 1.2), 0.05, assert_it=False)
    assert c.verdict == RECORDED and not c.within


def test_negative_control_is_caught():
    """A stub whose second number exceeds the first must fail S1."""

    def broken(P, n, kind, budget, seed):
        v = s_number(P, 1, kind, budget, seed)
        return v if n == 1 else v.scaled(1.5)

    P, Q = random_poly(1), random_poly(2)
    rep = verify_axioms([(P, Q)], "approximation", n_max=2, func=broken, s5_dims=(1,))
    assert not rep.ok
    assert any(c.name.startswith("S1 monotone") for c in rep.violations)


def test_axioms_pass_on_one_pair():
    P, Q = random_poly(3, p=1, q=2), random_poly(4, p=1, q=2)
    for kind in ("approximation", "kolmogorov", "gelfand_kappa"):
        rep = verify_axioms([(P, Q)], kind, n_max=2, s5_dims=(1, 2))
        assert rep.ok, [c.as_dict() for c in rep.violations]
        assert rep.passed("S5") and rep.passed("S4") and rep.passed("S3")


def test_rank_r_poly_has_rank_r():
    rng = np.random.default_rng(0)
    R = rank_r_poly(rng, 2, LpSpace(3, 2), LpSpace(3, 1), 2)
    assert np.linalg.matrix_rank(R.coeffs) == 2


def test_properties_hold():
    rep = verify_properties(random_poly(5, p=2, q=1), n_max=2)
    assert rep.ok and rep.by_name("S surjectivity") and rep.by_name("J injectivity")
    assert rep.by_name("M multiplicativity")


def test_relation_report_records_without_asserting():
    rep, vals = verify_relations(random_poly(8, p=1, q=1), n_max=2, mixed=False, linearized=False)
    assert rep.ok
    rec = rep.by_name("(ii)")
    assert rec and all(c.verdict == RECORDED and c.residual is not None for c in rec)
    assert set(vals.gelfand) == {"kappa", "linfty"} and set(vals.approx) == {1, 2}
    d = rep.as_dict()
    assert d["ok"] and {"name", "verdict", "lhs", "rhs", "slack"} <= set(d["checks"][0])

from __future__ import annotations

import math

import numpy as np
import pytest

from conftest import random_poly
from snumbers import HomPoly, LinearMap, LpSpace, poly_norm
from snumbers.oracle import hull_hausdorff, svd_singular_values
from snumbers.snum import approx_number, kolmogorov_number
from snumbers.snum.adjoint import adjoint_rank, snumbers_of_adjoint
from snumbers.snum.lifting import hull_sup, lifted_approx, lifting_trend
from snumbers.snum.linearized import linearized_number
from snumbers.spaces import ALLOWED_P, make_l1_lift
from snumbers.values import relation_slack

INF = math.inf


def test_adjoint_of_hilbert_operator_has_the_same_singular_values():
    H = LpSpace(3, 2)
    A = np.random.default_rng(2).uniform(-1, 1, (3, 3))
    sigma = svd_singular_values(LinearMap(H, H, A.T))
    P = HomPoly(1, H, H, A)
    for n in (1, 2, 3):
        for kind in ("approximation", "kolmogorov"):
            assert snumbers_of_adjoint(P, n, kind).hi == pytest.approx(sigma[n - 1], rel=1e-3)


@pytest.mark.parametrize("p,q", [(1.0, INF), (INF, 1.0), (2.0, 1.0), (1.0, 2.0)])
def test_adjoint_approximation_numbers(p, q):
    P = random_poly(17, p=p, q=q)
    nrm = poly_norm(P).hi
    for n in (1, 2):
        a, aA = approx_number(P, n), snumbers_of_adjoint(P, n, "approximation")
        assert aA.hi <= a.hi + relation_slack(aA, a)
        assert abs(aA.hi - a.hi) <= 5e-2 * nrm
        for kind in ("kolmogorov", "gelfand_kappa", "gelfand_linfty"):
            v = snumbers_of_adjoint(P, n, kind)
            assert v.lo <= v.hi and v.hi <= aA.hi + relation_slack(v, aA)
    assert adjoint_rank(P) == 2


@pytest.mark.parametrize("p,q", [(2.0, INF), (INF, 2.0), (1.0, 1.0)])
def test_linearized_numbers_transfer(p, q):
    P = random_poly(23, p=p, q=q)
    nrm = poly_norm(P).hi
    for n in (1, 2):
        for kind, own in (("approximation", approx_number(P, n)), ("kolmogorov", kolmogorov_number(P, n))):
            lr = linearized_number(P, n, kind)
            assert abs(lr.value.hi - own.hi) <= 5e-2 * nrm
            assert lr.max_pi_gap <= 1e-3
    with pytest.raises(ValueError):
        linearized_number(P, 1, "gelfand_kappa")


@pytest.mark.parametrize("p", ALLOWED_P)
def test_hull_sup_is_below_the_norm_and_converges(p):
    P = random_poly(6, p=p, q=2)
    nrm = poly_norm(P)
    prev = 0.0
    for N in (8, 32, 128):
        lift = make_l1_lift(P.domain, N, seed=0)
        v = lifted_approx(P, 1, lift)
        w = hull_sup(P.coeffs, 2, p, 2.0, lift.atoms)
        assert (v.lo, v.hi) == (w.lo, w.hi)
        assert v.hi <= nrm.hi + relation_slack(v, nrm)
        prev = max(prev, v.hi)
    assert nrm.hi - prev <= 0.05 * nrm.hi


@pytest.mark.parametrize("p", ALLOWED_P)
def test_lift_atoms_fill_the_ball(p):
    gaps = [hull_hausdorff(make_l1_lift(LpSpace(2, p), N).atoms, p).value for N in (8, 64)]
    assert gaps[1] <= gaps[0] + 1e-12 and gaps[1] <= 0.1


def test_lifting_trend_stays_below_kolmogorov():
    P = random_poly(44)
    tr = lifting_trend(P, 2, (8, 16, 32))
    for r in tr.results:
        assert r.value.hi <= tr.kolmogorov.hi + relation_slack(r.value, tr.kolmogorov)
    assert tr.gap_at(32) <= 0.1 * tr.norm.hi
    with pytest.raises(KeyError):
        tr.gap_at(64)

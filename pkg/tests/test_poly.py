from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_poly
from snumbers import HomPoly, LinearMap, LpSpace, Vector, adjoint, compose, evaluate, poly_norm, poly_rank, polarize
from snumbers.oracle import grid_norm, grid_upper
from snumbers.poly import linear_norm
from snumbers.spaces import ALLOWED_P, DimensionError

INF = math.inf
ps = st.sampled_from(ALLOWED_P)
seeds = st.integers(0, 2**31)


def test_from_terms_and_evaluation():
    P = HomPoly.from_terms(2, LpSpace(2, 2), LpSpace(2, 1), {(0, (1, 1)): 2.0, (1, (0, 2)): -1.0})
    assert np.allclose(P([3.0, 5.0]), [30.0, -25.0])
    assert P.terms() == {(0, (1, 1)): 2.0, (1, (0, 2)): -1.0}
    with pytest.raises(ValueError):
        HomPoly.from_terms(2, LpSpace(2, 2), LpSpace(1, 2), {(0, (3, 0)): 1.0})
    with pytest.raises(DimensionError):
        evaluate(P, Vector(LpSpace(3, 2), [1, 2, 3]))


@given(seeds, st.integers(1, 3))
def test_homogeneity_and_polarization(seed, m):
    P = random_poly(seed, d=3, k=2, m=m)
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(3)
    t = rng.uniform(-2, 2)
    assert np.allclose(P(t * x), t**m * P(x))
    assert np.allclose(polarize(P, *([x] * m)), P(x))
    if m >= 2:
        ys = [rng.standard_normal(3) for _ in range(m)]
        assert np.allclose(polarize(P, *ys), polarize(P, *ys[::-1]))


@given(seeds)
def test_compose_evaluates_as_composition(seed):
    rng = np.random.default_rng(seed)
    P = random_poly(seed, d=2, k=2, m=3)
    T = LinearMap(LpSpace(3, 1), P.domain, rng.uniform(-1, 1, (2, 3)))
    S = LinearMap(P.codomain, LpSpace(4, INF), rng.uniform(-1, 1, (4, 2)))
    x = rng.standard_normal(3)
    assert np.allclose(compose(S, P, T)(x), S(P(T(x))))


def test_linear_norms_closed_forms():
    A = np.array([[1.0, -2.0], [3.0, 0.5]])
    assert linear_norm(A, 1, 1)[0] == pytest.approx(np.abs(A).sum(axis=0).max())
    assert linear_norm(A, INF, INF)[0] == pytest.approx(np.abs(A).sum(axis=1).max())
    assert linear_norm(A, 2, 2)[0] == pytest.approx(np.linalg.svd(A)[1][0])
    assert linear_norm(A, 1, 2)[0] == pytest.approx(np.linalg.norm(A, axis=0).max())


@pytest.mark.parametrize("p", ALLOWED_P)
@pytest.mark.parametrize("q", ALLOWED_P)
def test_norm_interval_brackets_the_grid_oracle(p, q):
    P = random_poly(11, m=2, p=p, q=q)
    v = poly_norm(P)
    g = grid_norm(P)
    up = grid_upper(P.coeffs, 2, p, q, 2, 4001)
    assert v.lo_certified and v.hi_certified and v.converged
    assert g.value <= v.hi + 1e-9
    assert v.lo <= up + 1e-9
    assert v.hi - v.lo <= 1e-6 * v.hi


def test_norm_of_x1x2():
    P = HomPoly.from_terms(2, LpSpace(2, 2), LpSpace(1, 1), {(0, (1, 1)): 1.0})
    v = poly_norm(P)
    assert v.lo <= 0.5 <= v.hi and v.hi - v.lo < 1e-6


def test_rank_and_adjoint():
    P = random_poly(2, d=2, k=3, m=2)
    R = P.with_coeffs(np.outer([1.0, 2.0, 0.0], P.coeffs[0]))
    assert poly_rank(P) == 3 and poly_rank(R) == 1 and poly_rank(P * 0.0) == 0
    A = adjoint(P)
    phi = np.array([1.0, -1.0, 0.5])
    x = np.array([0.3, -0.8])
    assert A(phi).poly(x)[0] == pytest.approx(phi @ P(x))
    assert A.domain == LpSpace(3, 2) and A.rank() == 3


def test_algebra_requires_same_spaces():
    P = random_poly(1, p=2)
    Q = random_poly(2, p=1)
    with pytest.raises(DimensionError):
        P + Q
    assert np.allclose((P - P).coeffs, 0.0) and np.allclose((2 * P).coeffs, 2 * P.coeffs)


@pytest.mark.parametrize("p", [1.0, 2.0, math.inf])
@pytest.mark.parametrize("q", [1.0, 2.0, math.inf])
def test_one_dimensional_linear_norm(p, q):
    assert linear_norm(np.array([[-2.5]]), p, q)[0] == pytest.approx(2.5, abs=1e-12)

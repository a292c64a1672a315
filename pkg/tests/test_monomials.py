from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from snumbers.monomials import (
    derivative_tensor,
    index_lookup,
    interval_linear,
    interval_monomials,
    monomials,
    multi_indices,
    num_monomials,
    substitution_matrix,
)
from snumbers.oracle import _alphas, _evaluate

dims = st.integers(1, 4)
degs = st.integers(1, 4)


def test_canonical_order():
    assert multi_indices(2, 2).tolist() == [[2, 0], [1, 1], [0, 2]]
    assert index_lookup(3, 1) == {(1, 0, 0): 0, (0, 1, 0): 1, (0, 0, 1): 2}


@given(dims, degs)
def test_counts_and_degrees(d, m):
    A = multi_indices(d, m)
    assert len(A) == num_monomials(d, m) == math.comb(d + m - 1, m)
    assert np.all(A.sum(axis=1) == m)
    assert len({tuple(a) for a in A}) == len(A)
    assert np.array_equal(A, _alphas(d, m))


@given(dims, degs, st.integers(0, 2**31))
def test_monomials_match_explicit_products(d, m, seed):
    X = np.random.default_rng(seed).uniform(-2, 2, (5, d))
    C = np.eye(num_monomials(d, m))
    assert np.allclose(monomials(X, m), _evaluate(C, multi_indices(d, m), X))


@given(st.integers(1, 3), st.integers(1, 3), degs, st.integers(0, 2**31))
def test_substitution_matrix(d_in, d_out, m, seed):
    rng = np.random.default_rng(seed)
    T = rng.uniform(-1, 1, (d_out, d_in))
    X = rng.uniform(-1, 1, (4, d_in))
    L = substitution_matrix(T, m)
    assert np.allclose(monomials(X @ T.T, m), monomials(X, m) @ L.T)


@given(st.integers(1, 3), st.integers(2, 4), st.integers(0, 2**31))
def test_derivative_tensor_matches_finite_differences(d, m, seed):
    rng = np.random.default_rng(seed)
    C = rng.uniform(-1, 1, (2, num_monomials(d, m)))
    x = rng.uniform(-1, 1, d)
    dt = derivative_tensor(C, d, m)                       # (d, k, D')
    J = np.einsum("D,ikD->ki", monomials(x[None, :], m - 1)[0], dt)
    h = 1e-6
    fd = np.column_stack([(monomials((x + h * e)[None], m) - monomials((x - h * e)[None], m))[0] @ C.T / (2 * h)
                          for e in np.eye(d)])
    assert np.allclose(J, fd, atol=1e-6)


@given(st.integers(1, 3), degs, st.integers(0, 2**31))
def test_interval_enclosures_contain_samples(d, m, seed):
    rng = np.random.default_rng(seed)
    lo = rng.uniform(-1, 0.5, (3, d))
    hi = lo + rng.uniform(0, 1, (3, d))
    mlo, mhi = interval_monomials(lo, hi, m)
    C = rng.uniform(-1, 1, (2, num_monomials(d, m)))
    ylo, yhi = interval_linear(C, mlo, mhi)
    for _ in range(20):
        X = lo + (hi - lo) * rng.uniform(0, 1, lo.shape)
        M = monomials(X, m)
        assert np.all(M >= mlo - 1e-12) and np.all(M <= mhi + 1e-12)
        Y = M @ C.T
        assert np.all(Y >= ylo - 1e-12) and np.all(Y <= yhi + 1e-12)

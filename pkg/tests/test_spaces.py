from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from snumbers.oracle import distance_to_line, net_coverage
from snumbers.spaces import (
    ALLOWED_P,
    DimensionError,
    LpSpace,
    Subspace,
    Vector,
    distance_to_subspace,
    dual_exponent,
    format_p,
    lp_norm,
    make_l1_lift,
    nearest_in_subspace,
    parse_p,
    sphere_net,
)

ps = st.sampled_from(ALLOWED_P)
vec2 = st.lists(st.floats(-5, 5, allow_nan=False), min_size=2, max_size=2).map(np.array)


@pytest.mark.parametrize("raw,want", [(1, 1.0), ("2", 2.0), ("inf", math.inf), ("∞", math.inf), (math.inf, math.inf)])
def test_parse_p(raw, want):
    assert parse_p(raw) == want


def test_parse_p_rejects_other_exponents():
    with pytest.raises(ValueError):
        parse_p(3)


def test_dual_exponents_pair_up():
    assert [dual_exponent(p) for p in ALLOWED_P] == [math.inf, 2.0, 1.0]
    assert [format_p(p) for p in ALLOWED_P] == ["1", "2", "inf"]


@given(st.lists(st.floats(-1e3, 1e3, allow_nan=False), min_size=1, max_size=6), ps)
def test_lp_norm_matches_numpy(x, p):
    assert lp_norm(x, p) == pytest.approx(np.linalg.norm(np.array(x), ord=p), rel=1e-12, abs=1e-12)


def test_space_validation():
    with pytest.raises(DimensionError):
        LpSpace(0, 2)
    with pytest.raises(DimensionError):
        Vector(LpSpace(2, 2), [1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        Subspace(LpSpace(3, 2), np.array([[1.0, 2.0], [0.0, 0.0], [0.0, 0.0]]))


@pytest.mark.parametrize("p", ALLOWED_P)
@pytest.mark.parametrize("dim", [2, 3])
def test_sphere_net_covers(dim, p):
    delta = 0.2
    net = sphere_net(LpSpace(dim, p), delta)
    assert np.allclose(lp_norm(net.points, p), 1.0)
    cov = net_coverage(net.points, p, samples=4000)
    assert cov.value <= delta


def test_sphere_net_is_deterministic():
    a = sphere_net(LpSpace(3, 1), 0.3, seed=5).points
    b = sphere_net(LpSpace(3, 1), 0.3, seed=5).points
    assert np.array_equal(a, b)


def test_dimension_guard(monkeypatch):
    monkeypatch.setenv("SNUM_MAX_DIM", "2")
    with pytest.raises(DimensionError):
        sphere_net(LpSpace(3, 2), 0.3)


@given(vec2, vec2.filter(lambda u: np.abs(u).max() > 0.1), ps)
def test_distance_to_line_matches_scalar_search(y, u, p):
    d = distance_to_subspace(y, Subspace(LpSpace(2, p), u))
    assert d == pytest.approx(distance_to_line(y, u, p).value, abs=1e-7)


@pytest.mark.parametrize("p", ALLOWED_P)
def test_nearest_point_in_plane_of_l3(p):
    rng = np.random.default_rng(3)
    U = rng.standard_normal((3, 2))
    Y = rng.standard_normal((5, 3))
    dist, coef = nearest_in_subspace(Y, U, p)
    assert np.allclose(lp_norm(Y - coef @ U.T, p), dist)
    # no random point of the span is closer
    for c in rng.standard_normal((200, 2)):
        assert np.all(lp_norm(Y - U @ c, p) >= dist - 1e-9)


@pytest.mark.parametrize("p", ALLOWED_P)
def test_l1_lift_atoms(p):
    lift = make_l1_lift(LpSpace(2, p), 16, seed=1)
    assert lift.size == 16 and lift.domain.p == 1.0
    assert np.all(lp_norm(lift.atoms, p) <= 1 + 1e-12)
    lam = np.zeros(16)
    lam[3] = 1.0
    assert np.allclose(lift.apply(lam), lift.atoms[3])

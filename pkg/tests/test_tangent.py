import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oscar import MomentEstimate
from oscar.errors import DegenerateAngleError, DegenerateRiskError, NoDirectionError, ValidationError
from oscar.linalg import cholesky, factorize
from oscar.tangent import BudgetDegeneracyWarning, Portfolio, angle_to, sharpe, solve_tangent

from conftest import random_instance, ref_max_sharpe


def test_identity_case():
    m = MomentEstimate([0.1, 0.2, 0.3], np.eye(3))
    p = solve_tangent(m)
    np.testing.assert_allclose(p.weights, [1 / 6, 1 / 3, 1 / 2], rtol=1e-14)
    assert p.normalized
    assert sharpe(p, m) == pytest.approx(math.sqrt(0.14), rel=1e-14)
    assert sharpe(p, m) == pytest.approx(0.374166, abs=1e-6)


@pytest.mark.parametrize("n", [2, 5, 9])
def test_equal_mu_equal_weights(n):
    p = solve_tangent(MomentEstimate(np.full(n, 0.07), np.eye(n)))
    np.testing.assert_allclose(p.weights, 1.0 / n, rtol=1e-14)


def test_hand_2x2():
    sigma = np.array([[4.0, 2.0], [2.0, 3.0]])
    mu = np.array([0.1, 0.2])
    inv = np.array([[3.0, -2.0], [-2.0, 4.0]]) / 8.0
    direction = inv @ mu
    np.testing.assert_allclose(direction, [-0.0125, 0.075], rtol=1e-14)
    m = MomentEstimate(mu, sigma)
    p = solve_tangent(m)
    np.testing.assert_allclose(p.weights, [-0.2, 1.2], rtol=1e-13)
    assert sharpe(p, m) == pytest.approx(math.sqrt(mu @ inv @ mu), rel=1e-13)


def test_zero_mu():
    with pytest.raises(NoDirectionError):
        solve_tangent(MomentEstimate([0.0, 0.0], np.eye(2)))


def test_degenerate_budget_keeps_direction():
    # Sigma^-1 mu = (0.1, -0.3) sums to -0.2
    m = MomentEstimate([0.1, -0.3], np.eye(2))
    with pytest.warns(BudgetDegeneracyWarning):
        p = solve_tangent(m)
    assert not p.normalized
    np.testing.assert_allclose(p.weights, [0.1, -0.3])
    assert sharpe(p, m) == pytest.approx(math.sqrt(0.1), rel=1e-14)


def test_portfolio_invariants():
    with pytest.raises(ValidationError):
        Portfolio([0.0, 0.0])
    with pytest.raises(ValidationError):
        Portfolio([0.5, 0.6], normalized=True)
    with pytest.raises(ValidationError):
        Portfolio([np.nan, 1.0])


def test_sharpe_single_asset():
    m = MomentEstimate([0.3, 0.1], np.eye(2))
    assert sharpe([1.0, 0.0], m) == pytest.approx(0.3)


def test_sharpe_zero_risk():
    m = MomentEstimate([0.3, 0.1], np.diag([0.0, 1.0]))
    with pytest.raises(DegenerateRiskError):
        sharpe([1.0, 0.0], m)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 12), st.integers(0, 2**32 - 1), st.floats(1e-6, 1e6))
def test_scale_invariance(n, seed, lam):
    rng = np.random.default_rng(seed)
    m = random_instance(rng, n)
    w = rng.standard_normal(n)
    s = sharpe(w, m)
    assert abs(sharpe(lam * w, m) - s) <= 1e-12 * (1 + abs(s))


@pytest.mark.filterwarnings("ignore::oscar.tangent.BudgetDegeneracyWarning")
def test_tangent_dominates_random_portfolios(rng):
    m = random_instance(rng, 5)
    best = sharpe(solve_tangent(m), m)
    for _ in range(1000):
        assert best >= sharpe(rng.standard_normal(5), m) - 1e-9


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 15), st.integers(0, 2**32 - 1))
def test_closed_form_magnitude(n, seed):
    rng = np.random.default_rng(seed)
    m = random_instance(rng, n)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", BudgetDegeneracyWarning)
        p = solve_tangent(m)
    if p.normalized:
        s = sharpe(p, m)
        assert s**2 == pytest.approx(ref_max_sharpe(m.mu, m.sigma) ** 2, rel=1e-8)


def test_angle_identity_and_orthogonal():
    f = cholesky(np.eye(2))
    assert angle_to([1.0, 2.0], [1.0, 2.0], f) == pytest.approx(0.0, abs=1e-7)
    assert angle_to([1.0, 0.0], [0.0, 1.0], f) == pytest.approx(math.pi / 2)


def test_angle_clamps_overshoot():
    f = cholesky(np.eye(3))
    w = np.array([0.1, 0.7, 0.3])
    assert angle_to(w, 3.0 * w, f) == pytest.approx(0.0, abs=1e-7)


def test_angle_zero_vector():
    with pytest.raises(DegenerateAngleError):
        angle_to([0.0, 0.0], [1.0, 0.0], cholesky(np.eye(2)))


def _positive_sharpe_pair(rng, m):
    while True:
        w1, w2 = rng.standard_normal((2, m.n))
        if sharpe(w1, m) > 0 and sharpe(w2, m) > 0:
            return w1, w2


def test_angle_orders_like_sharpe(rng):
    for _ in range(20):
        n = int(rng.integers(2, 12))
        m = random_instance(rng, n)
        f = factorize(m.sigma)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", BudgetDegeneracyWarning)
            ref = solve_tangent(m, f)
        for _ in range(10):
            w1, w2 = _positive_sharpe_pair(rng, m)
            d_sr = sharpe(w1, m) - sharpe(w2, m)
            d_th = angle_to(w2, ref, f) - angle_to(w1, ref, f)
            assert np.sign(d_sr) == np.sign(d_th)


def test_angle_is_cos_of_sharpe_ratio(rng):
    # cos(theta) = SR(w) / SR(w_hat): the identity behind the ordering
    m = random_instance(rng, 6)
    f = factorize(m.sigma)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", BudgetDegeneracyWarning)
        ref = solve_tangent(m, f)
    w = rng.standard_normal(6)
    assert math.cos(angle_to(w, ref, f)) == pytest.approx(sharpe(w, m) / sharpe(ref, m), abs=1e-12)

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oscar.errors import DimensionError, IrrecoverableMatrixError, NotPositiveDefiniteError
from oscar.linalg import (
    CholeskyFactor,
    cholesky,
    condition_spd,
    factorize,
    jitter_ladder,
    solve_spd,
    transform_by_lt,
)

from conftest import random_spd, ref_cholesky


def test_hand_factor_2x2():
    f = cholesky([[4.0, 2.0], [2.0, 3.0]])
    np.testing.assert_allclose(f.l, [[2.0, 0.0], [1.0, math.sqrt(2.0)]], atol=1e-15)
    assert f.jitter_applied == 0.0 and f.n == 2


@pytest.mark.parametrize("n", [1, 2, 5, 17])
def test_identity(n):
    np.testing.assert_array_equal(cholesky(np.eye(n)).l, np.eye(n))


def test_indefinite_reports_pivot():
    with pytest.raises(NotPositiveDefiniteError) as ei:
        cholesky([[1.0, 2.0], [2.0, 1.0]])
    assert ei.value.pivot == 2


def test_asymmetric_rejected():
    with pytest.raises(ValueError, match="symmetric"):
        cholesky([[1.0, 0.5], [0.0, 1.0]])


def test_matches_reference_cholesky(rng):
    for n in (3, 7, 12):
        a = random_spd(rng, n)
        np.testing.assert_allclose(cholesky(a).l, ref_cholesky(a.tolist()), rtol=1e-12, atol=1e-14)


def test_factor_is_lower_with_positive_diagonal(rng):
    l = cholesky(random_spd(rng, 9)).l
    assert np.all(np.triu(l, 1) == 0.0)
    assert np.all(np.diag(l) > 0)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 25), st.integers(0, 2**32 - 1), st.floats(1e-3, 1e3))
def test_reconstruction(n, seed, scale):
    a = scale * random_spd(np.random.default_rng(seed), n)
    l = cholesky(a).l
    assert np.max(np.abs(l @ l.T - a)) <= 1e-8 * max(1.0, np.max(np.abs(a)))


def test_ladder():
    assert jitter_ladder(1e-6) == [0.0, 1e-12, 1e-11, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6]
    assert jitter_ladder(3e-12) == [0.0, 1e-12, 3e-12]


def test_condition_spd_leaves_spd_alone(rng):
    a = random_spd(rng, 5)
    out, lam = condition_spd(a)
    assert lam == 0.0
    np.testing.assert_array_equal(out, a)


def test_condition_rank_deficient():
    a = np.array([[1.0, 1.0], [1.0, 1.0]])
    with pytest.raises(NotPositiveDefiniteError):
        cholesky(a)
    out, lam = condition_spd(a)
    assert 0 < lam <= 1e-8
    # run the ladder by hand: every smaller rung must fail
    for rung in jitter_ladder()[: jitter_ladder().index(lam)]:
        with pytest.raises(NotPositiveDefiniteError):
            cholesky(a + rung * np.eye(2))
    assert out[0, 1] == a[0, 1] and out[1, 0] == a[1, 0]
    np.testing.assert_allclose(np.diag(out) - np.diag(a), lam, rtol=0, atol=1e-15)
    assert np.all(np.diag(cholesky(out).l) > 0)


def test_condition_zero_matrix():
    out, lam = condition_spd(np.zeros((2, 2)), max_jitter=1e-6)
    assert lam == 1e-12
    np.testing.assert_array_equal(out, 1e-12 * np.eye(2))


def test_irrecoverable():
    with pytest.raises(IrrecoverableMatrixError):
        condition_spd([[1.0, 2.0], [2.0, 1.0]], max_jitter=1e-6)


def test_factorize_records_jitter():
    f = factorize(np.zeros((3, 3)))
    assert f.jitter_applied == 1e-12


def test_solve_identity():
    np.testing.assert_array_equal(solve_spd(cholesky(np.eye(2)), [3.0, 5.0]), [3.0, 5.0])


def test_solve_hand_2x2():
    x = solve_spd(cholesky([[4.0, 2.0], [2.0, 3.0]]), [1.0, 0.0])
    np.testing.assert_allclose(x, [0.375, -0.25], rtol=1e-14)


def test_solve_residual_10x10(rng):
    a = random_spd(rng, 10)
    b = rng.standard_normal(10)
    x = solve_spd(cholesky(a), b)
    assert np.linalg.norm(a @ x - b) <= 1e-8 * (1 + np.linalg.norm(b))


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 15), st.integers(0, 2**32 - 1), st.floats(0, 8))
def test_solve_recovers_x(n, seed, log_cond):
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    eig = np.logspace(0, -log_cond, n)
    a = (q * eig) @ q.T
    a = 0.5 * (a + a.T)
    x = rng.standard_normal(n)
    got = solve_spd(cholesky(a), a @ x)
    assert np.linalg.norm(got - x) <= 1e-6 * np.linalg.norm(x)


def test_dimension_mismatch():
    f = cholesky(np.eye(3))
    with pytest.raises(DimensionError):
        solve_spd(f, [1.0, 2.0])
    with pytest.raises(DimensionError):
        transform_by_lt(f, [1.0])


def test_transform_identity():
    np.testing.assert_array_equal(transform_by_lt(cholesky(np.eye(3)), [1.0, -2.0, 3.0]), [1, -2, 3])


def test_transform_hand():
    f = CholeskyFactor(np.array([[2.0, 0.0], [1.0, math.sqrt(2.0)]]))
    np.testing.assert_allclose(transform_by_lt(f, [1.0, 1.0]), [3.0, math.sqrt(2.0)], rtol=1e-15)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 20), st.integers(0, 2**32 - 1))
def test_transform_preserves_quadratic_form(n, seed):
    rng = np.random.default_rng(seed)
    a = random_spd(rng, n)
    w = rng.standard_normal(n)
    z = transform_by_lt(cholesky(a), w)
    q = float(w @ a @ w)
    assert abs(float(z @ z) - q) <= 1e-8 * q

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oscar import MomentEstimate
from oscar.errors import UndefinedRatioError, ValidationError
from oscar.metrics import BenchRecord, diagonal_dominance, hit_count, pearson_correlation, performance_ratio
from oscar.oracle import solve_exact
from oscar.selection import HEURISTICS

from conftest import random_instance, random_spd


def test_performance_arithmetic():
    assert performance_ratio(0.35, 0.40) == pytest.approx(87.5)


def test_performance_identity(rng):
    m = random_instance(rng, 6)
    r = solve_exact(m, 2)
    assert performance_ratio(r.best, r) == 100.0


def test_performance_undefined():
    with pytest.raises(UndefinedRatioError):
        performance_ratio(0.3, 0.0)
    with pytest.raises(UndefinedRatioError):
        performance_ratio(math.nan, 0.3)


def test_performance_scale_free(rng):
    m = random_instance(rng, 8)
    scaled = MomentEstimate(3.7 * m.mu, m.sigma)
    for fn in HEURISTICS.values():
        a = performance_ratio(fn(m, 3), solve_exact(m, 3))
        b = performance_ratio(fn(scaled, 3), solve_exact(scaled, 3))
        assert a == pytest.approx(b, rel=1e-12)


def test_hit_count():
    assert hit_count({1, 2, 3}, {2, 3, 4}) == 2
    assert hit_count((5, 6, 7), (7, 6, 5)) == 3


def test_hit_pct():
    r = BenchRecord("x", 10, 4, "OSCAR", 0.1, 90.0, 3, 0.0, True, 0.0, 0.7)
    assert r.hit_pct == 75.0


def test_dominance_examples():
    assert diagonal_dominance([[4.0, 2.0], [2.0, 3.0]]) == pytest.approx(3.5 / 5.5, rel=1e-15)
    assert diagonal_dominance(np.diag([1.0, 5.0, 2.0])) == 1.0


@pytest.mark.parametrize("n", [2, 3, 10, 40])
def test_dominance_equicorrelated(n):
    sigma = 0.5 * np.eye(n) + 0.5 * np.ones((n, n))
    assert diagonal_dominance(sigma) == pytest.approx(2.0 / 3.0, rel=1e-14)


def test_dominance_uses_absolute_values():
    assert diagonal_dominance([[1.0, -0.5], [-0.5, 1.0]]) == pytest.approx(1 / 1.5)


def test_dominance_needs_n2():
    with pytest.raises(ValidationError):
        diagonal_dominance([[1.0]])


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 12), st.integers(0, 2**32 - 1), st.floats(1e-3, 1e3), st.data())
def test_dominance_invariances(n, seed, c, data):
    s = random_spd(np.random.default_rng(seed), n)
    d = diagonal_dominance(s)
    perm = np.array(data.draw(st.permutations(range(n))))
    assert 0 < d <= 1
    assert diagonal_dominance(s[np.ix_(perm, perm)]) == pytest.approx(d, rel=1e-12)
    assert diagonal_dominance(c * s) == pytest.approx(d, rel=1e-12)


def test_pearson_affine():
    xs = [1.0, 2.0, 4.0, 7.0]
    assert pearson_correlation(xs, [2 * x + 1 for x in xs]) == pytest.approx(1.0)
    assert pearson_correlation(xs, [-x for x in xs]) == pytest.approx(-1.0)


def test_pearson_second_formula():
    xs = [1.0, 2.0, 3.0, 4.0, 5.0]
    ys = [2.0, 1.0, 4.0, 3.0, 7.0]
    n = len(xs)
    sx, sy = sum(xs), sum(ys)
    sxy = sum(x * y for x, y in zip(xs, ys))
    sxx, syy = sum(x * x for x in xs), sum(y * y for y in ys)
    expected = (n * sxy - sx * sy) / math.sqrt((n * sxx - sx**2) * (n * syy - sy**2))
    # centred by hand: sum dx*dy = 12, sum dx^2 = 10, sum dy^2 = 21.2
    assert expected == pytest.approx(12 / math.sqrt(212), rel=1e-12)
    assert pearson_correlation(xs, ys) == pytest.approx(expected, rel=1e-12)


def test_pearson_preconditions():
    with pytest.raises(ValidationError):
        pearson_correlation([1.0, 2.0], [1.0, 2.0])
    with pytest.raises(ValidationError):
        pearson_correlation([1.0, 1.0, 1.0], [1.0, 2.0, 3.0])

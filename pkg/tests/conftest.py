import math

import numpy as np
import pytest

from oscar import MomentEstimate


def random_spd(rng, n, cond_floor=0.1):
    a = rng.standard_normal((n, n))
    return a @ a.T / n + cond_floor * np.eye(n)


def random_instance(rng, n, mu_lo=-0.05, mu_hi=0.15):
    return MomentEstimate(rng.uniform(mu_lo, mu_hi, n), random_spd(rng, n))


def diagonal_instance(rng, n):
    return MomentEstimate(rng.uniform(-0.05, 0.15, n), np.diag(rng.uniform(0.25, 4.0, n)))


def ref_cholesky(a):
    """Textbook row-by-row Cholesky in plain Python; independent of LAPACK."""
    n = len(a)
    l = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1):
            s = sum(l[i][p] * l[j][p] for p in range(j))
            if i == j:
                l[i][i] = math.sqrt(a[i][i] - s)
            else:
                l[i][j] = (a[i][j] - s) / l[j][j]
    return np.array(l)


def ref_max_sharpe(mu, sigma):
    """sqrt(mu' Sigma^-1 mu) via numpy's general inverse."""
    return math.sqrt(float(mu @ np.linalg.inv(sigma) @ mu))


@pytest.fixture
def rng():
    return np.random.default_rng(20241019)

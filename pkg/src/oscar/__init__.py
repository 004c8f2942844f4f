"""Cardinality-constrained tangent portfolios via Cholesky-ranked asset selection."""

from .errors import OscarError
from .linalg import CholeskyFactor, cholesky, condition_spd, factorize, solve_spd, transform_by_lt
from .market_data import (
    MomentEstimate,
    PricePanel,
    ReturnPanel,
    compute_returns,
    drop_incomplete_assets,
    estimate_moments,
    load_prices,
)
from .metrics import BenchRecord, diagonal_dominance, hit_count, pearson_correlation, performance_ratio
from .oracle import OracleResult, solve_exact
from .selection import (
    HEURISTICS,
    SelectionOrder,
    SparsePortfolio,
    oscar_order,
    select_backward,
    select_forward,
    select_oscar,
    select_topk_sharpe,
    select_topk_weight,
)
from .synth import SynthSpec, dominance_sweep, generate
from .tangent import Portfolio, angle_to, sharpe, solve_tangent

__version__ = "0.1.0"

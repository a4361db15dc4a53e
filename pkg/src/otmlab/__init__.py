"""Measure analytics for the Black-Scholes-Merton model: pricing under both
measures, a sequential out-of-the-money call strategy, and a structural
volatility smile."""

from .errors import (
    DegenerateDistributionError,
    DomainError,
    InfeasibleBudgetError,
    NumericalError,
    OtmlabError,
)
from .market import (
    LogReturn,
    MarketParams,
    critical_volatility,
    physical_log_density,
    risk_neutral_log_density,
    rn_ratio,
    short_time_ratio,
)
from .options import (
    OptionKind,
    OptionSpec,
    Valuation,
    call_physical_moments,
    call_price,
    call_price_quadrature,
    digital_expected_return,
    digital_physical_prob,
    digital_price,
    digital_return_lower_bound,
    double_digital_physical_prob,
    double_digital_price,
    power_call_physical_moments,
    power_call_price,
    valuate,
)
from .smile import (
    BoundAuditReport,
    SmileParams,
    default_audit_grid,
    logistic_saturation,
    max_expected_return,
    ratio_bound_audit,
    ratio_exponent,
    smile_sigma,
)
from .strategy import (
    SimulationResult,
    StrategyConfig,
    StrategyStats,
    analytic_annual_stats,
    beta_convergence,
    per_period_moments,
    prob_ratio_fixed_strike,
    prob_ratio_growth,
    simulate,
    solve_strike_ratio,
    strike_ratio_growth,
)

__version__ = "0.1.0"

"""Sequential option-buying strategy: strike solving, analytic statistics,
Monte Carlo simulation, and the limit diagnostics from the appendix-style
scaling.

The year is split into n holding periods. At the start of each period the
strategy spends budget/n (in units of the then-current spot) on options
struck at a constant multiple c of spot, holds to expiry, banks the
proceeds, and repeats. Sizing positions inversely to spot makes the
per-period payoffs i.i.d. in spot-relative units, so only gross returns are
ever simulated, never absolute price paths.

Two cash conventions exist. The default "zero" keeps proceeds in a
non-interest-bearing account and treats every discount factor as 1; "r"
discounts option prices, grows proceeds at the short rate until year end,
and benchmarks the Sharpe ratio against exp(r) - 1 instead of 0.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import log_ndtr

from . import options
from .errors import (
    DegenerateDistributionError,
    DomainError,
    InfeasibleBudgetError,
    NumericalError,
)
from .market import MarketParams
from .options import OptionKind, OptionSpec

_LN_TOL = 1e-12
_DEFAULT_CHUNK = 131072


@dataclass(frozen=True)
class StrategyConfig:
    """Parameters of one strategy run.

    Exactly one of strike_ratio (c) and budget (I) is given; the other is
    implied through the per-period budget equation price(c, 1/n) = I/n.
    notional scales every cash flow without changing the strikes.
    """

    n: int
    market: MarketParams
    family: OptionKind = OptionKind.VANILLA_CALL
    strike_ratio: float | None = None
    budget: float | None = None
    power: float | None = None
    interval_halfwidth: float = 0.05  # double digital window [c(1-h), c(1+h)]
    notional: float = 1.0
    interest: str = "zero"
    beta_regressor: str = "gross"

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise DomainError(f"n must be an integer >= 1, got {self.n!r}")
        if (self.strike_ratio is None) == (self.budget is None):
            raise DomainError("exactly one of strike_ratio and budget must be set")
        if self.strike_ratio is not None and not (
            math.isfinite(self.strike_ratio) and self.strike_ratio > 0
        ):
            raise DomainError(f"strike_ratio must be positive, got {self.strike_ratio!r}")
        if self.budget is not None and not (math.isfinite(self.budget) and self.budget > 0):
            raise DomainError(f"budget must be positive, got {self.budget!r}")
        if self.family is OptionKind.POWER_CALL:
            if self.power is None or self.power < 0:
                raise DomainError("power family needs a payoff exponent >= 0")
        if not (0.0 < self.interval_halfwidth < 1.0):
            raise DomainError("interval_halfwidth must lie in (0, 1)")
        if not (math.isfinite(self.notional) and self.notional > 0):
            raise DomainError(f"notional must be positive, got {self.notional!r}")
        if self.interest not in ("zero", "r"):
            raise DomainError(f"interest must be 'zero' or 'r', got {self.interest!r}")
        if self.beta_regressor not in ("gross", "log"):
            raise DomainError(f"beta_regressor must be 'gross' or 'log', got {self.beta_regressor!r}")


@dataclass(frozen=True)
class StrategyStats:
    """Annual payoff statistics. SE fields carry Monte Carlo standard errors
    and stay None for analytic results; beta is only estimated from paths."""

    expected_payoff: float
    payoff_std: float
    sharpe: float
    budget: float
    strike_ratio: float
    beta: float | None = None
    expected_payoff_se: float | None = None
    payoff_std_se: float | None = None
    sharpe_se: float | None = None
    beta_se: float | None = None


@dataclass(frozen=True)
class SimulationResult:
    stats: StrategyStats
    payoffs: np.ndarray  # terminal payoff per path
    underlying: np.ndarray  # annual gross return of the underlying per path
    lag1_autocorr: float
    lag1_autocorr_se: float
    payoff_corr: float  # sample correlation of payoff with the underlying
    payoff_corr_se: float


def _period_spec(c: float, tau: float, cfg: StrategyConfig) -> OptionSpec:
    if cfg.family is OptionKind.VANILLA_CALL:
        return OptionSpec.vanilla_call(c, tau)
    if cfg.family is OptionKind.DIGITAL:
        return OptionSpec.digital(c, tau)
    if cfg.family is OptionKind.DOUBLE_DIGITAL:
        h = cfg.interval_halfwidth
        return OptionSpec.double_digital(c * (1.0 - h), c * (1.0 + h), tau)
    return OptionSpec.power_call(c, cfg.power, tau)


def _period_price(c: float, tau: float, cfg: StrategyConfig) -> float:
    """Spot-relative price of one period's option under the cash convention."""
    spec = _period_spec(c, tau, cfg)
    market = cfg.market
    if cfg.family is OptionKind.VANILLA_CALL:
        price = options.call_price(1.0, spec, market)
    elif cfg.family is OptionKind.DIGITAL:
        price = options.digital_price(1.0, spec, market)
    elif cfg.family is OptionKind.DOUBLE_DIGITAL:
        price = options.double_digital_price(1.0, spec, market)
    else:
        price = options.power_call_price(1.0, spec, market)
    if cfg.interest == "zero":
        price *= math.exp(market.r * tau)
    return price


def _solve_ratio(target: float, tau: float, cfg: StrategyConfig) -> float:
    """Unique c with period price equal to target, by bisection on ln c.

    The price is strictly decreasing in c on the searched branch; for double
    digitals the branch starts where the window's lower edge passes the
    pricing-measure median, which is where monotonicity sets in.
    """
    if target <= 0.0:
        raise InfeasibleBudgetError(f"per-period budget must be positive, got {target!r}")
    if cfg.family is OptionKind.DOUBLE_DIGITAL:
        m_q = (cfg.market.r - 0.5 * cfg.market.sigma**2) * tau
        c_floor = math.exp(m_q) / (1.0 - cfg.interval_halfwidth)
    else:
        c_floor = 1e-10
    top = _period_price(c_floor, tau, cfg)
    if target >= top:
        raise InfeasibleBudgetError(
            f"per-period budget {target:.6g} is not below the maximal price "
            f"{top:.6g} of the {cfg.family.value} family"
        )
    lo = math.log(c_floor)
    hi = max(lo + 1.0, 0.0)
    for _ in range(200):
        if _period_price(math.exp(hi), tau, cfg) < target:
            break
        hi += 1.0
    else:
        raise NumericalError("could not bracket the strike ratio from above")
    while hi - lo > _LN_TOL:
        mid = 0.5 * (lo + hi)
        if _period_price(math.exp(mid), tau, cfg) > target:
            lo = mid
        else:
            hi = mid
    return math.exp(0.5 * (lo + hi))


def solve_strike_ratio(budget: float, n: int, market: MarketParams, **family_kwargs) -> float:
    """Strike-to-spot ratio that makes each period's option cost budget/n.

    family_kwargs are forwarded to StrategyConfig (family, power, interest,
    interval_halfwidth).
    """
    cfg = StrategyConfig(n=n, market=market, budget=budget, **family_kwargs)
    return _solve_ratio(budget / n, 1.0 / n, cfg)


def resolve(cfg: StrategyConfig) -> tuple[float, float]:
    """(strike ratio, effective annual budget) for a config."""
    tau = 1.0 / cfg.n
    if cfg.strike_ratio is not None:
        c = cfg.strike_ratio
        budget = cfg.n * _period_price(c, tau, cfg)
    else:
        c = _solve_ratio(cfg.budget / cfg.n, tau, cfg)
        budget = cfg.budget
    return c, cfg.notional * budget


def per_period_moments(
    c: float, n: int, market: MarketParams, family: OptionKind = OptionKind.VANILLA_CALL,
    *, power: float | None = None, interval_halfwidth: float = 0.05,
) -> tuple[float, float]:
    """Physical mean and variance of one period's spot-relative payoff.

    Identical across periods: sizing by 1/spot reduces each period to one
    option on a unit spot over tau = 1/n.
    """
    tau = 1.0 / n
    if family is OptionKind.VANILLA_CALL:
        mean, std = options.call_physical_moments(1.0, OptionSpec.vanilla_call(c, tau), market)
        return mean, std * std
    if family is OptionKind.DIGITAL:
        p = options.digital_physical_prob(1.0, OptionSpec.digital(c, tau), market)
        return p, p * (1.0 - p)
    if family is OptionKind.DOUBLE_DIGITAL:
        h = interval_halfwidth
        spec = OptionSpec.double_digital(c * (1.0 - h), c * (1.0 + h), tau)
        p = options.double_digital_physical_prob(1.0, spec, market)
        return p, p * (1.0 - p)
    mean, std = options.power_call_physical_moments(
        1.0, OptionSpec.power_call(c, power, tau), market
    )
    return mean, std * std


def _growth_factors(cfg: StrategyConfig) -> np.ndarray:
    """Year-end growth applied to each period's proceeds."""
    n = cfg.n
    if cfg.interest == "zero":
        return np.ones(n)
    t_end = (np.arange(n) + 1.0) / n
    return np.exp(cfg.market.r * (1.0 - t_end))


def _benchmark(cfg: StrategyConfig, budget: float) -> float:
    return budget if cfg.interest == "zero" else budget * math.exp(cfg.market.r)


def analytic_annual_stats(cfg: StrategyConfig) -> StrategyStats:
    """Exact annual statistics from per-period moments and independence.

    Sharpe is (E[payoff] - benchmark) / std[payoff] with the benchmark set
    by the cash convention (the budget itself under zero interest). Beta is
    not an analytic output; simulate estimates it.
    """
    c, budget = resolve(cfg)
    mean_per, var_per = per_period_moments(
        c, cfg.n, cfg.market, cfg.family,
        power=cfg.power, interval_halfwidth=cfg.interval_halfwidth,
    )
    growth = _growth_factors(cfg)
    mean = cfg.notional * mean_per * float(growth.sum())
    var = cfg.notional**2 * var_per * float((growth * growth).sum())
    if var <= 0.0:
        raise DegenerateDistributionError(
            "per-period payoff variance is zero; Sharpe ratio undefined"
        )
    std = math.sqrt(var)
    return StrategyStats(
        expected_payoff=mean,
        payoff_std=std,
        sharpe=(mean - _benchmark(cfg, budget)) / std,
        budget=budget,
        strike_ratio=c,
    )


def _payoff_matrix(x: np.ndarray, c: float, cfg: StrategyConfig) -> np.ndarray:
    if cfg.family is OptionKind.VANILLA_CALL:
        return np.maximum(x - c, 0.0)
    if cfg.family is OptionKind.DIGITAL:
        return (x >= c).astype(float)
    if cfg.family is OptionKind.DOUBLE_DIGITAL:
        h = cfg.interval_halfwidth
        return ((x >= c * (1.0 - h)) & (x <= c * (1.0 + h))).astype(float)
    if cfg.power == 0.0:
        return (x > c).astype(float)
    return np.maximum(x - c, 0.0) ** cfg.power


def _sharpe_se(y: np.ndarray, sharpe: float) -> float:
    """Mertens standard error of a Sharpe estimate (moment-adjusted)."""
    n = y.size
    sd = y.std(ddof=1)
    if sd == 0.0:
        return math.nan
    z = (y - y.mean()) / sd
    skew = float((z**3).mean())
    kurt = float((z**4).mean())
    var = (1.0 - skew * sharpe + 0.25 * (kurt - 1.0) * sharpe**2) / n
    return math.sqrt(max(var, 0.0))


def simulate(
    cfg: StrategyConfig,
    num_paths: int,
    seed: int,
    *,
    chunk_size: int = _DEFAULT_CHUNK,
) -> SimulationResult:
    """Monte Carlo run of the strategy with exact lognormal period returns.

    Paths are generated in fixed-size chunks, each from its own counter-based
    substream keyed by (seed, chunk index), and reduced in chunk order:
    results are bit-identical for a given (seed, chunk_size) regardless of
    how the chunks are scheduled. Per-period proceeds follow the configured
    cash convention; beta regresses the annual strategy return on the
    underlying's annual gross (or log) return from the same paths.
    """
    if not isinstance(num_paths, int) or num_paths < 2:
        raise DomainError(f"num_paths must be an integer >= 2, got {num_paths!r}")
    if not isinstance(seed, int) or seed < 0:
        raise DomainError(f"seed must be a non-negative integer, got {seed!r}")
    if not isinstance(chunk_size, int) or chunk_size < 1:
        raise DomainError(f"chunk_size must be a positive integer, got {chunk_size!r}")

    c, budget = resolve(cfg)
    n = cfg.n
    tau = 1.0 / n
    m_p = (cfg.market.mu - 0.5 * cfg.market.sigma**2) * tau
    s = cfg.market.sigma * math.sqrt(tau)
    growth = _growth_factors(cfg)

    payoffs = np.empty(num_paths)
    underlying = np.empty(num_paths)
    sum_lag = 0.0
    sum_phi = 0.0
    sum_phi2 = 0.0
    n_lag_pairs = 0
    n_phi = 0

    n_chunks = (num_paths + chunk_size - 1) // chunk_size
    for k in range(n_chunks):
        start = k * chunk_size
        stop = min(start + chunk_size, num_paths)
        rng = np.random.Generator(
            np.random.Philox(np.random.SeedSequence(entropy=seed, spawn_key=(k,)))
        )
        log_ret = m_p + s * rng.standard_normal((stop - start, n))
        phi = cfg.notional * _payoff_matrix(np.exp(log_ret), c, cfg)
        payoffs[start:stop] = phi @ growth
        underlying[start:stop] = np.exp(log_ret.sum(axis=1))
        if n > 1:
            sum_lag += float((phi[:, :-1] * phi[:, 1:]).sum())
            n_lag_pairs += phi.shape[0] * (n - 1)
        sum_phi += float(phi.sum())
        sum_phi2 += float((phi * phi).sum())
        n_phi += phi.size

    mean = float(payoffs.mean())
    std = float(payoffs.std(ddof=1))
    mean_se = std / math.sqrt(num_paths)
    if std > 0.0:
        kurt = float((((payoffs - mean) / std) ** 4).mean())
        # kurtosis-adjusted: the normal-theory sqrt(2N) rule understates the
        # sampling error of the skewed payoff's standard deviation
        std_se = std * math.sqrt(max(kurt - 1.0, 0.0) / (4.0 * (num_paths - 1)))
    else:
        std_se = 0.0
    if std > 0.0:
        sharpe = (mean - _benchmark(cfg, budget)) / std
        sharpe_se = _sharpe_se(payoffs, sharpe)
    else:
        sharpe = math.nan
        sharpe_se = math.nan

    regressor = underlying if cfg.beta_regressor == "gross" else np.log(underlying)
    # a zero budget only happens when the option price underflows; returns
    # then degenerate to raw payoffs
    denom = budget if budget > 0.0 else 1.0
    strat_return = (payoffs - budget) / denom
    var_x = float(regressor.var(ddof=1))
    var_y = float(payoffs.var(ddof=1))
    if var_x > 0.0:
        cov = float(np.cov(strat_return, regressor, ddof=1)[0, 1])
        beta = cov / var_x
        resid_var = max(float(strat_return.var(ddof=1)) - beta**2 * var_x, 0.0)
        beta_se = math.sqrt(resid_var / (var_x * (num_paths - 2)))
    else:
        beta = 0.0
        beta_se = math.nan
    if var_x > 0.0 and var_y > 0.0:
        corr = float(np.corrcoef(payoffs, underlying)[0, 1])
        corr_se = (1.0 - corr**2) / math.sqrt(num_paths - 1)
    else:
        corr = 0.0
        corr_se = math.nan

    phi_mean = sum_phi / n_phi
    phi_var = sum_phi2 / n_phi - phi_mean**2
    if n_lag_pairs > 0 and phi_var > 0.0:
        lag1 = (sum_lag / n_lag_pairs - phi_mean**2) / phi_var
        lag1_se = 1.0 / math.sqrt(n_lag_pairs)
    else:
        lag1 = math.nan
        lag1_se = math.nan

    stats = StrategyStats(
        expected_payoff=mean,
        payoff_std=std,
        sharpe=sharpe,
        budget=budget,
        strike_ratio=c,
        beta=beta,
        expected_payoff_se=mean_se,
        payoff_std_se=std_se,
        sharpe_se=sharpe_se,
        beta_se=beta_se,
    )
    return SimulationResult(
        stats=stats,
        payoffs=payoffs,
        underlying=underlying,
        lag1_autocorr=lag1,
        lag1_autocorr_se=lag1_se,
        payoff_corr=corr,
        payoff_corr_se=corr_se,
    )


def beta_convergence(
    cfg: StrategyConfig, n_list: list[int], num_paths: int, seed: int
) -> list[tuple[int, float, float]]:
    """Payoff-underlying correlation across period counts, matched seeds.

    With the strike ratio held fixed, more periods mean deeper per-period
    strikes in volatility units, so the options almost always expire
    worthless and the payoff decorrelates from the underlying. The sample
    correlation is the statistic that converges: it is scale-free, whereas
    the regression slope of the *return* on the underlying divides a
    vanishing payoff by a vanishing budget and settles near a constant.
    """
    if list(n_list) != sorted(n_list) or len(set(n_list)) != len(n_list):
        raise DomainError("n_list must be strictly increasing")
    rows = []
    for n in n_list:
        result = simulate(dataclasses.replace(cfg, n=n), num_paths, seed)
        rows.append((n, result.payoff_corr, result.payoff_corr_se))
    return rows


def strike_ratio_growth(
    n_list: list[int],
    market: MarketParams,
    *,
    bet_horizon: float = 1.0 / 12.0,
    interest: str = "zero",
) -> list[tuple[int, float]]:
    """Digital strikes c(n) solving 1/n = price of the digital, per n.

    This is the limit construction behind the divergence claims: the per-bet
    law is pinned to a fixed horizon while an annual budget of 1 is split
    over ever more bets, so each bet's price target 1/n shrinks and the
    solved strike grows without bound. (Coupling the horizon to 1/n instead
    makes c(n) fall back toward 1; see prob_ratio_fixed_strike for that
    bounded contrast.)
    """
    rows = []
    for n in n_list:
        cfg = StrategyConfig(
            n=max(int(n), 1), market=market, family=OptionKind.DIGITAL,
            budget=1.0, interest=interest,
        )
        rows.append((n, _solve_ratio(1.0 / n, bet_horizon, cfg)))
    return rows


def prob_ratio_growth(
    n_list: list[int],
    market: MarketParams,
    *,
    bet_horizon: float = 1.0 / 12.0,
    interest: str = "zero",
) -> list[tuple[int, float]]:
    """Trigger-probability ratios p(n)/q(n) along strike_ratio_growth.

    Under the zero-interest convention q(n) = 1/n by construction, so the
    ratio equals n * p(n). Tails are evaluated in log space.
    """
    spots = strike_ratio_growth(n_list, market, bet_horizon=bet_horizon, interest=interest)
    rows = []
    for n, c in spots:
        spec = OptionSpec.digital(c, bet_horizon)
        rows.append((n, options.digital_expected_return(1.0, spec, market) + 1.0))
    return rows


def prob_ratio_fixed_strike(
    n_list: list[int], c: float, market: MarketParams
) -> list[tuple[int, float]]:
    """p/q across n with the horizon coupled to 1/n at a fixed strike ratio.

    Bounded: as n grows the ratio converges to the short-time measure ratio
    dP/dQ at ln c, documenting that divergence needs growing strikes. The
    ratio is a pure probability quotient evaluated entirely in log space, so
    it stays defined even when the tail probabilities themselves underflow.
    """
    if c <= 0.0 or not math.isfinite(c):
        raise DomainError(f"strike ratio must be positive, got {c!r}")
    lnc = math.log(c)
    sig2 = market.sigma**2
    rows = []
    for n in n_list:
        tau = 1.0 / n
        s = market.sigma * math.sqrt(tau)
        z_p = ((market.mu - 0.5 * sig2) * tau - lnc) / s
        z_q = ((market.r - 0.5 * sig2) * tau - lnc) / s
        rows.append((n, math.exp(float(log_ndtr(z_p)) - float(log_ndtr(z_q)))))
    return rows

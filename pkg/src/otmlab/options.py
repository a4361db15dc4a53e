"""Valuation and physical-measure moments for European-style payoffs.

Prices are discounted expectations under the pricing measure; physical
moments are undiscounted expectations under the real-world drift. Vanilla
calls and digitals carry closed forms; the quadrature routes integrate the
lognormal kernel on the log-price axis and back the closed forms as an
independent check. Power options generalize both: p = 1 is the vanilla call
and p = 0 the digital, under the convention (max(S-K, 0))^0 = 1 for S > K
and 0^0 = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from scipy.special import log_ndtr, ndtr

from . import quadrature
from .errors import DomainError
from .market import MarketParams

_LOG_TAIL_FLOOR = math.log(1e-300)


class OptionKind(Enum):
    VANILLA_CALL = "vanilla_call"
    DIGITAL = "digital"
    DOUBLE_DIGITAL = "double_digital"
    POWER_CALL = "power_call"


@dataclass(frozen=True)
class OptionSpec:
    """One European-style contract.

    strike applies to vanilla, digital and power calls (a digital strike must
    be strictly positive); interval is the closed payoff window of a double
    digital; power is the payoff exponent of a power call.
    """

    kind: OptionKind
    tau: float  # time to maturity, years
    strike: float | None = None
    interval: tuple[float, float] | None = None
    power: float | None = None

    def __post_init__(self):
        if not math.isfinite(self.tau) or self.tau <= 0.0:
            raise DomainError(f"tau must be a positive finite time, got {self.tau!r}")
        if self.kind in (OptionKind.VANILLA_CALL, OptionKind.POWER_CALL):
            if self.strike is None or not math.isfinite(self.strike) or self.strike < 0:
                raise DomainError(f"{self.kind.value} needs a strike >= 0, got {self.strike!r}")
        if self.kind is OptionKind.DIGITAL:
            if self.strike is None or not math.isfinite(self.strike) or self.strike <= 0:
                raise DomainError(f"digital needs a strike > 0, got {self.strike!r}")
        if self.kind is OptionKind.POWER_CALL:
            if self.power is None or not math.isfinite(self.power) or self.power < 0:
                raise DomainError(f"power call needs an exponent >= 0, got {self.power!r}")
        if self.kind is OptionKind.DOUBLE_DIGITAL:
            if self.interval is None:
                raise DomainError("double digital needs a payoff interval")
            a, b = self.interval
            if not (math.isfinite(a) and math.isfinite(b) and 0.0 < a < b):
                raise DomainError(f"double digital needs 0 < a < b, got {self.interval!r}")

    @classmethod
    def vanilla_call(cls, strike: float, tau: float) -> "OptionSpec":
        return cls(OptionKind.VANILLA_CALL, tau, strike=strike)

    @classmethod
    def digital(cls, strike: float, tau: float) -> "OptionSpec":
        return cls(OptionKind.DIGITAL, tau, strike=strike)

    @classmethod
    def double_digital(cls, lower: float, upper: float, tau: float) -> "OptionSpec":
        return cls(OptionKind.DOUBLE_DIGITAL, tau, interval=(lower, upper))

    @classmethod
    def power_call(cls, strike: float, power: float, tau: float) -> "OptionSpec":
        return cls(OptionKind.POWER_CALL, tau, strike=strike, power=power)


@dataclass(frozen=True)
class Valuation:
    """Price plus real-world payoff moments for one contract.

    expected_return is physical_mean / price - 1 where the price basis
    follows the interest convention the valuation was built with (discount
    factor treated as 1 under the zero-interest convention).
    """

    price: float
    physical_mean: float
    physical_std: float
    expected_return: float


def _require_kind(spec: OptionSpec, kind: OptionKind) -> None:
    if spec.kind is not kind:
        raise DomainError(f"expected a {kind.value} spec, got {spec.kind.value}")


def _check_spot(spot: float) -> None:
    if not math.isfinite(spot) or spot <= 0.0:
        raise DomainError(f"spot must be positive and finite, got {spot!r}")


def _gauss_params(tau: float, market: MarketParams, physical: bool) -> tuple[float, float]:
    """(mean, std) of ln(S_tau / spot) under the chosen measure."""
    drift = market.mu if physical else market.r
    return (drift - 0.5 * market.sigma**2) * tau, market.sigma * math.sqrt(tau)


def _mean_above(k: float, m: float, s: float) -> float:
    """E[(X - k)^+] for ln X ~ N(m, s^2)."""
    if k <= 0.0:
        return math.exp(m + 0.5 * s * s) - k
    d2 = (m - math.log(k)) / s
    return math.exp(m + 0.5 * s * s) * ndtr(d2 + s) - k * ndtr(d2)


def _sq_above(k: float, m: float, s: float) -> float:
    """E[((X - k)^+)^2] for ln X ~ N(m, s^2)."""
    if k <= 0.0:
        d2 = math.inf
    else:
        d2 = (m - math.log(k)) / s
    return (
        math.exp(2.0 * m + 2.0 * s * s) * ndtr(d2 + 2.0 * s)
        - 2.0 * k * math.exp(m + 0.5 * s * s) * ndtr(d2 + s)
        + k * k * ndtr(d2)
    )


def _log_tail(k: float, m: float, s: float) -> float:
    """log P(X >= k), evaluated in the tail-stable form."""
    return float(log_ndtr((m - math.log(k)) / s))


def _quad_expectation(payoff, lnk: float, order: float, m: float, s: float, rel_tol: float) -> float:
    """E[payoff(X)] by quadrature on the log axis.

    payoff vanishes below exp(lnk) and grows at most like x**order above, so
    the Gaussian window is widened by order * s^2 on the upper side. The
    payoff kink sits on the lower panel boundary.
    """
    lo = max(lnk, m - 12.0 * s)
    hi = m + order * s * s + 12.0 * s
    if hi <= lo:
        hi = lo + 24.0 * s
    norm = 1.0 / (s * math.sqrt(2.0 * math.pi))

    def integrand(z: float) -> float:
        u = (z - m) / s
        return payoff(math.exp(z)) * math.exp(-0.5 * u * u) * norm

    return quadrature.integrate(integrand, lo, hi, rel_tol=rel_tol)


def call_price(spot: float, spec: OptionSpec, market: MarketParams) -> float:
    """Discounted risk-neutral value of a vanilla call, closed form.

    Homogeneous of degree one in (spot, strike).
    """
    _require_kind(spec, OptionKind.VANILLA_CALL)
    _check_spot(spot)
    m, s = _gauss_params(spec.tau, market, physical=False)
    return spot * math.exp(-market.r * spec.tau) * _mean_above(spec.strike / spot, m, s)


def call_price_quadrature(
    spot: float, spec: OptionSpec, market: MarketParams, *, rel_tol: float = 1e-10
) -> float:
    """Vanilla call value by adaptive quadrature of the lognormal kernel.

    Independent route against the closed form; the two agree to about the
    quadrature tolerance.
    """
    _require_kind(spec, OptionKind.VANILLA_CALL)
    _check_spot(spot)
    k = spec.strike / spot
    m, s = _gauss_params(spec.tau, market, physical=False)
    lnk = math.log(k) if k > 0.0 else -math.inf
    value = _quad_expectation(lambda x: x - k, lnk, 1.0, m, s, rel_tol)
    return spot * math.exp(-market.r * spec.tau) * value


def call_physical_moments(
    spot: float, spec: OptionSpec, market: MarketParams, *, rel_tol: float = 1e-10
) -> tuple[float, float]:
    """Undiscounted mean and standard deviation of the call payoff under the
    real-world drift, by quadrature. Both scale linearly in spot."""
    _require_kind(spec, OptionKind.VANILLA_CALL)
    _check_spot(spot)
    k = spec.strike / spot
    m, s = _gauss_params(spec.tau, market, physical=True)
    lnk = math.log(k) if k > 0.0 else -math.inf
    mean = _quad_expectation(lambda x: x - k, lnk, 1.0, m, s, rel_tol)
    second = _quad_expectation(lambda x: (x - k) ** 2, lnk, 2.0, m, s, rel_tol)
    var = max(second - mean * mean, 0.0)
    return spot * mean, spot * math.sqrt(var)


def _call_physical_moments_closed(
    spot: float, spec: OptionSpec, market: MarketParams
) -> tuple[float, float]:
    """Closed-form twin of call_physical_moments (cross-check route)."""
    k = spec.strike / spot
    m, s = _gauss_params(spec.tau, market, physical=True)
    mean = _mean_above(k, m, s)
    var = max(_sq_above(k, m, s) - mean * mean, 0.0)
    return spot * mean, spot * math.sqrt(var)


def digital_price(spot: float, spec: OptionSpec, market: MarketParams) -> float:
    """Discounted pricing-measure probability that the digital triggers."""
    _require_kind(spec, OptionKind.DIGITAL)
    _check_spot(spot)
    m, s = _gauss_params(spec.tau, market, physical=False)
    return math.exp(-market.r * spec.tau) * float(ndtr((m - math.log(spec.strike / spot)) / s))


def digital_physical_prob(spot: float, spec: OptionSpec, market: MarketParams) -> float:
    """Real-world probability that the digital triggers."""
    _require_kind(spec, OptionKind.DIGITAL)
    _check_spot(spot)
    m, s = _gauss_params(spec.tau, market, physical=True)
    return float(ndtr((m - math.log(spec.strike / spot)) / s))


def digital_expected_return(
    spot: float, spec: OptionSpec, market: MarketParams, *, discount: bool = False
) -> float:
    """Expected rate of return p/q - 1 of holding the digital to maturity.

    p and q are the trigger probabilities under the physical and pricing
    measures. By default the discount factor is treated as 1 (zero-interest
    convention); discount=True divides by the discounted price instead.
    Both tails are evaluated in log space so deep strikes do not underflow.
    """
    _require_kind(spec, OptionKind.DIGITAL)
    _check_spot(spot)
    k = spec.strike / spot
    mp, s = _gauss_params(spec.tau, market, physical=True)
    mq, _ = _gauss_params(spec.tau, market, physical=False)
    log_q = _log_tail(k, mq, s)
    if log_q < _LOG_TAIL_FLOOR:
        raise DomainError(
            f"digital strike {spec.strike!r} is too deep: pricing-measure trigger "
            f"probability below 1e-300"
        )
    log_p = _log_tail(k, mp, s)
    extra = market.r * spec.tau if discount else 0.0
    return math.exp(log_p - log_q + extra) - 1.0


def digital_return_lower_bound(spot: float, spec: OptionSpec, market: MarketParams) -> float:
    """Lower bound on the digital expected return from the measure ratio.

    Equals dP/dQ evaluated at the log-strike, minus one; the bound is tight
    as the trigger region shrinks and holds whenever mu > r because dP/dQ is
    increasing in the log-return.
    """
    _require_kind(spec, OptionKind.DIGITAL)
    _check_spot(spot)
    sig2 = market.sigma**2
    x = math.log(spec.strike / spot)
    exponent = (market.mu - market.r) * (
        x / sig2 - spec.tau * (market.mu + market.r) / (2.0 * sig2) + 0.5 * spec.tau
    )
    return math.exp(exponent) - 1.0


def double_digital_price(spot: float, spec: OptionSpec, market: MarketParams) -> float:
    """Discounted pricing-measure probability of finishing inside the window."""
    _require_kind(spec, OptionKind.DOUBLE_DIGITAL)
    _check_spot(spot)
    a, b = spec.interval
    m, s = _gauss_params(spec.tau, market, physical=False)
    mass = math.exp(_log_tail(a / spot, m, s)) - math.exp(_log_tail(b / spot, m, s))
    return math.exp(-market.r * spec.tau) * mass


def double_digital_physical_prob(spot: float, spec: OptionSpec, market: MarketParams) -> float:
    """Real-world probability of finishing inside the window."""
    _require_kind(spec, OptionKind.DOUBLE_DIGITAL)
    _check_spot(spot)
    a, b = spec.interval
    m, s = _gauss_params(spec.tau, market, physical=True)
    return math.exp(_log_tail(a / spot, m, s)) - math.exp(_log_tail(b / spot, m, s))


def power_call_price(
    spot: float, spec: OptionSpec, market: MarketParams, *, rel_tol: float = 1e-10
) -> float:
    """Discounted value of the payoff (max(S_T - K, 0))^p, by quadrature.

    Reduces to the vanilla call at p = 1 and to the digital at p = 0 under
    the 0^0 = 0 convention. Prices are quoted per unit of spot**p scaling,
    i.e. the payoff is evaluated on the actual price axis.
    """
    _require_kind(spec, OptionKind.POWER_CALL)
    _check_spot(spot)
    k = spec.strike / spot
    p = spec.power
    m, s = _gauss_params(spec.tau, market, physical=False)
    lnk = math.log(k) if k > 0.0 else -math.inf
    payoff = _power_payoff(k, p)
    value = _quad_expectation(payoff, lnk, p, m, s, rel_tol)
    return spot**p * math.exp(-market.r * spec.tau) * value


def power_call_physical_moments(
    spot: float, spec: OptionSpec, market: MarketParams, *, rel_tol: float = 1e-10
) -> tuple[float, float]:
    """Undiscounted physical mean and standard deviation of the power payoff."""
    _require_kind(spec, OptionKind.POWER_CALL)
    _check_spot(spot)
    k = spec.strike / spot
    p = spec.power
    m, s = _gauss_params(spec.tau, market, physical=True)
    lnk = math.log(k) if k > 0.0 else -math.inf
    payoff = _power_payoff(k, p)
    mean = _quad_expectation(payoff, lnk, p, m, s, rel_tol)
    second = _quad_expectation(lambda x: payoff(x) ** 2, lnk, 2.0 * p, m, s, rel_tol)
    var = max(second - mean * mean, 0.0)
    return spot**p * mean, spot**p * math.sqrt(var)


def _power_payoff(k: float, p: float):
    if p == 0.0:
        # the trigger region is encoded by the integration bounds; {S == K}
        # carries no mass, so the 0^0 = 0 convention costs nothing here
        return lambda x: 1.0
    return lambda x: max(x - k, 0.0) ** p


def valuate(
    spot: float,
    spec: OptionSpec,
    market: MarketParams,
    *,
    interest: str = "zero",
    rel_tol: float = 1e-10,
) -> Valuation:
    """Full valuation of any supported contract.

    interest="zero" treats the discount factor as 1, so the reported price
    is the bare pricing-measure expectation and expected_return compares the
    physical mean against it. interest="r" reports the discounted price and
    measures the return against that instead.
    """
    if interest not in ("zero", "r"):
        raise DomainError(f"interest must be 'zero' or 'r', got {interest!r}")
    kind = spec.kind
    if kind is OptionKind.VANILLA_CALL:
        price = call_price(spot, spec, market)
        mean, std = call_physical_moments(spot, spec, market, rel_tol=rel_tol)
    elif kind is OptionKind.DIGITAL:
        price = digital_price(spot, spec, market)
        mean = digital_physical_prob(spot, spec, market)
        std = math.sqrt(max(mean * (1.0 - mean), 0.0))
    elif kind is OptionKind.DOUBLE_DIGITAL:
        price = double_digital_price(spot, spec, market)
        mean = double_digital_physical_prob(spot, spec, market)
        std = math.sqrt(max(mean * (1.0 - mean), 0.0))
    else:
        price = power_call_price(spot, spec, market, rel_tol=rel_tol)
        mean, std = power_call_physical_moments(spot, spec, market, rel_tol=rel_tol)
    if interest == "zero":
        price = price * math.exp(market.r * spec.tau)
    if price <= 0.0:
        raise DomainError("contract has zero value; expected return undefined")
    return Valuation(
        price=price,
        physical_mean=mean,
        physical_std=std,
        expected_return=mean / price - 1.0,
    )

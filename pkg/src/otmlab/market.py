"""Log-return densities under the physical and risk-neutral measures.

Everything here works on x = ln(S_tau / S_0), where the two measures only
differ by the location of the Gaussian: (mu - sigma^2/2) tau under the
physical measure versus (r - sigma^2/2) tau under the pricing measure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError


@dataclass(frozen=True)
class MarketParams:
    """Constant-parameter Black-Scholes-Merton world."""

    mu: float  # drift of the underlying, per annum
    r: float  # risk-free short rate, per annum
    sigma: float  # volatility, per sqrt-annum

    def __post_init__(self):
        for name in ("mu", "r", "sigma"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise DomainError(f"{name} must be a finite number, got {value!r}")
        if self.sigma <= 0.0:
            raise DomainError(f"sigma must be positive, got {self.sigma}")

    @property
    def risk_premium_positive(self) -> bool:
        """True when the drift exceeds the short rate.

        Several monotonicity statements (the measure ratio decreasing in x,
        out-of-the-money digitals earning a positive expected return) hold
        only under this condition; operations that assume it say so in their
        docstrings instead of silently requiring it.
        """
        return self.mu > self.r


@dataclass(frozen=True)
class LogReturn:
    """One observed log-return ln(S_tau / S_0) over an elapsed time tau."""

    x: float  # natural log of the gross return, dimensionless
    tau: float  # elapsed time, years

    def __post_init__(self):
        if not isinstance(self.x, (int, float)) or not math.isfinite(self.x):
            raise DomainError(f"log-return x must be finite, got {self.x!r}")
        if (
            not isinstance(self.tau, (int, float))
            or not math.isfinite(self.tau)
            or self.tau <= 0.0
        ):
            raise DomainError(f"tau must be a positive finite time, got {self.tau!r}")


def _normal_pdf(x: float, mean: float, std: float) -> float:
    z = (x - mean) / std
    return math.exp(-0.5 * z * z) / (std * math.sqrt(2.0 * math.pi))


def physical_log_density(lr: LogReturn, params: MarketParams) -> float:
    """Density of the log-return under the physical measure.

    ln(S_tau/S_0) is normal with mean (mu - sigma^2/2) tau and variance
    sigma^2 tau. Strictly positive and integrates to 1 over x.
    """
    mean = (params.mu - 0.5 * params.sigma**2) * lr.tau
    return _normal_pdf(lr.x, mean, params.sigma * math.sqrt(lr.tau))


def risk_neutral_log_density(lr: LogReturn, params: MarketParams) -> float:
    """Density of the log-return under the pricing measure.

    Same Gaussian as the physical density with the center shifted to
    (r - sigma^2/2) tau.
    """
    mean = (params.r - 0.5 * params.sigma**2) * lr.tau
    return _normal_pdf(lr.x, mean, params.sigma * math.sqrt(lr.tau))


def rn_ratio(lr: LogReturn, params: MarketParams) -> float:
    """Radon-Nikodym derivative dQ/dP at a given log-return.

    Closed form exp((r - mu)(x/sigma^2 - tau (r + mu)/(2 sigma^2) + tau/2));
    algebraically identical to the quotient of the two density functions.
    Strictly decreasing in x when mu > r, with limits 0 at +inf and +inf
    at -inf.
    """
    sig2 = params.sigma**2
    exponent = (params.r - params.mu) * (
        lr.x / sig2 - lr.tau * (params.r + params.mu) / (2.0 * sig2) + 0.5 * lr.tau
    )
    return math.exp(exponent)


def short_time_ratio(x: float, params: MarketParams) -> float:
    """Limit of the measure ratio dQ/dP as the elapsed time shrinks to zero.

    exp(x (r - mu) / sigma^2): keeps the x-asymptotics of the finite-time
    ratio, equals 1 at x = 0, and decays exponentially in x when mu > r.
    """
    if not isinstance(x, (int, float)) or not math.isfinite(x):
        raise DomainError(f"log-moneyness x must be finite, got {x!r}")
    return math.exp(x * (params.r - params.mu) / params.sigma**2)


def critical_volatility(params: MarketParams) -> float:
    """Volatility at which the measure ratio becomes time-scale free.

    Returns sqrt(mu + r), the sigma for which (mu + r)/sigma^2 = 1. There
    the tau-dependent part of the ratio exponent, -tau (r + mu)/(2 sigma^2)
    + tau/2, vanishes, so the finite-time ratio coincides with its
    short-time limit for every tau. Above this level the direction of the
    time-scale effect inverts.
    """
    if params.mu + params.r <= 0.0:
        raise DomainError(
            f"no inversion level: mu + r = {params.mu + params.r} must be positive"
        )
    return math.sqrt(params.mu + params.r)

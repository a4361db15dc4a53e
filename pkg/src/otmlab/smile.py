"""Structural volatility smile from bounding the short-time measure ratio.

A flat volatility lets x (mu - r) / sigma^2, the exponent of the short-time
state-price density ratio dP/dQ, run off to +/- infinity in the log-strike
x. Forcing that quantity to stay inside finite bounds (R_minus, R_plus)
pins down how sigma must grow with |x|; a saturating odd transfer curve
interpolates between the two asymptotic branches and yields an explicit
smile formula that is flat only at the money.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Iterable
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .market import MarketParams


@dataclass(frozen=True)
class SmileParams:
    """Base volatility and the ratio-exponent bounds."""

    sigma0: float
    r_plus: float
    r_minus: float

    def __post_init__(self):
        if not (math.isfinite(self.sigma0) and self.sigma0 > 0):
            raise DomainError(f"sigma0 must be positive, got {self.sigma0!r}")
        if not (self.r_minus < 0.0 < self.r_plus):
            raise DomainError(
                f"bounds must satisfy r_minus < 0 < r_plus, got ({self.r_minus}, {self.r_plus})"
            )

    @property
    def symmetric(self) -> bool:
        return self.r_plus == -self.r_minus

    @classmethod
    def with_symmetric_bound(cls, sigma0: float, bound: float) -> "SmileParams":
        return cls(sigma0=sigma0, r_plus=bound, r_minus=-bound)


@dataclass(frozen=True)
class BoundAuditReport:
    """Pointwise check of the ratio exponent against its bounds."""

    x_grid: tuple[float, ...]
    ratios: tuple[float, ...]
    violations: tuple[tuple[float, float], ...]  # (x, ratio) outside bounds
    passed: bool


def logistic_saturation(x: float, limit: float) -> float:
    """Odd saturating transfer curve sign(x) (1 - exp(-sqrt|x|)) * limit.

    Vanishes at 0 (sign(0) taken as 0) and approaches +/- limit as
    x -> +/- infinity, staying strictly inside.
    """
    if not (math.isfinite(limit) and limit > 0):
        raise DomainError(f"limit must be positive, got {limit!r}")
    if x == 0.0:
        return 0.0
    magnitude = (1.0 - math.exp(-math.sqrt(abs(x)))) * limit
    return magnitude if x > 0 else -magnitude


def smile_sigma(x: float, sp: SmileParams, market: MarketParams) -> float:
    """Heuristic smile volatility at log-moneyness x = ln(K / S_0).

    sigma0 + sqrt(x (mu - r) / L(x)) away from the money and exactly sigma0
    at x = 0; the added term vanishes continuously as x -> 0 and approaches
    the branch asymptote sqrt(x (mu - r) / R) far from the money. Requires
    mu > r, which signs the construction. With asymmetric bounds the
    saturation limit is r_plus on the call wing and |r_minus| on the put
    wing.
    """
    if market.mu <= market.r:
        raise DomainError(
            f"smile construction needs mu > r, got mu={market.mu}, r={market.r}"
        )
    if x == 0.0:
        return sp.sigma0
    limit = sp.r_plus if x > 0 else -sp.r_minus
    return sp.sigma0 + math.sqrt(x * (market.mu - market.r) / logistic_saturation(x, limit))


def ratio_exponent(x: float, sigma: float, market: MarketParams) -> float:
    """x (mu - r) / sigma^2, the short-time exponent of dP/dQ at x."""
    return x * (market.mu - market.r) / (sigma * sigma)


def ratio_bound_audit(
    sigma_curve: Callable[[float], float],
    sp: SmileParams,
    market: MarketParams,
    x_grid: Iterable[float],
) -> BoundAuditReport:
    """Flag grid points where the ratio exponent escapes (r_minus, r_plus).

    A flat curve with mu > r always fails far enough out; the generated
    smile passes on any finite grid because the sigma0 offset keeps the
    exponent strictly inside its bounds.
    """
    xs = [float(x) for x in x_grid]
    ratios = []
    violations = []
    for x in xs:
        sigma = float(sigma_curve(x))
        if not (math.isfinite(sigma) and sigma > 0):
            raise DomainError(f"curve must be positive on the grid, got sigma({x})={sigma!r}")
        rho = ratio_exponent(x, sigma, market)
        ratios.append(rho)
        if not (sp.r_minus < rho < sp.r_plus):
            violations.append((x, rho))
    return BoundAuditReport(
        x_grid=tuple(xs),
        ratios=tuple(ratios),
        violations=tuple(violations),
        passed=not violations,
    )


def max_expected_return(sp: SmileParams) -> float:
    """Least upper bound exp(R) - 1 on short-horizon expected rates of return.

    Defined for the symmetric choice R = r_plus = -r_minus, where R caps the
    magnitude of the ratio exponent in both wings.
    """
    if not sp.symmetric:
        raise DomainError("max expected return is defined for symmetric bounds")
    return math.exp(sp.r_plus) - 1.0


def default_audit_grid(lo: float = -5.0, hi: float = 5.0, step: float = 0.01) -> np.ndarray:
    """Default audit grid: [-5, 5] in steps of 0.01."""
    count = int(round((hi - lo) / step))
    return lo + step * np.arange(count + 1)

import math

import numpy as np
import pytest

from otmlab import (
    DomainError,
    LogReturn,
    MarketParams,
    OptionKind,
    OptionSpec,
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
    rn_ratio,
    valuate,
)
from otmlab.options import _call_physical_moments_closed

PAPER = MarketParams(mu=0.1, r=0.04, sigma=0.2)
FLAT = MarketParams(mu=0.04, r=0.04, sigma=0.2)


def lognormal_paths(mean_log, std_log, count, seed):
    """Exact lognormal sampler used as the Monte Carlo oracle."""
    rng = np.random.default_rng(seed)
    return np.exp(mean_log + std_log * rng.standard_normal(count))


class TestOptionSpec:
    def test_vanilla_allows_zero_strike(self):
        OptionSpec.vanilla_call(0.0, 1.0)

    def test_vanilla_rejects_negative_strike(self):
        with pytest.raises(DomainError):
            OptionSpec.vanilla_call(-1.0, 1.0)

    def test_digital_requires_positive_strike(self):
        with pytest.raises(DomainError):
            OptionSpec.digital(0.0, 1.0)

    def test_double_digital_requires_ordered_window(self):
        with pytest.raises(DomainError):
            OptionSpec.double_digital(1.2, 1.1, 1.0)
        with pytest.raises(DomainError):
            OptionSpec.double_digital(0.0, 1.1, 1.0)

    def test_power_requires_nonnegative_exponent(self):
        with pytest.raises(DomainError):
            OptionSpec.power_call(1.1, -0.5, 1.0)

    def test_tau_must_be_positive(self):
        with pytest.raises(DomainError):
            OptionSpec.vanilla_call(1.1, 0.0)

    def test_kind_mismatch_rejected(self):
        with pytest.raises(DomainError):
            call_price(1.0, OptionSpec.digital(1.1, 1.0), PAPER)


class TestCallPrice:
    def test_zero_strike_prices_the_spot(self):
        spec = OptionSpec.vanilla_call(0.0, 1 / 12)
        assert call_price(1.0, spec, PAPER) == pytest.approx(1.0, rel=1e-14)
        assert call_price_quadrature(1.0, spec, PAPER) == pytest.approx(1.0, rel=1e-9)

    def test_vanishes_monotonically_for_deep_strikes(self):
        strikes = [1.0, 1.5, 2.0, 3.0, 5.0]
        prices = [call_price(1.0, OptionSpec.vanilla_call(k, 1 / 12), PAPER) for k in strikes]
        assert all(b < a for a, b in zip(prices, prices[1:]))
        assert prices[-1] < 1e-12

    def test_monte_carlo_oracle(self):
        """spot=1, K=1.05, sigma=0.2, r=0.04, tau=1/12 against 1e7 exact draws."""
        tau = 1 / 12
        spec = OptionSpec.vanilla_call(1.05, tau)
        m = (PAPER.r - 0.5 * PAPER.sigma**2) * tau
        s = PAPER.sigma * math.sqrt(tau)
        paths = lognormal_paths(m, s, 10_000_000, seed=9001)
        payoff = np.maximum(paths - 1.05, 0.0)
        disc = math.exp(-PAPER.r * tau)
        mc = disc * payoff.mean()
        se = disc * payoff.std(ddof=1) / math.sqrt(payoff.size)
        assert abs(call_price(1.0, spec, PAPER) - mc) < 3 * se
        assert abs(call_price_quadrature(1.0, spec, PAPER) - mc) < 3 * se

    @pytest.mark.parametrize("scale", [0.5, 7.0])
    def test_homogeneous_in_spot_and_strike(self, scale):
        base = call_price(1.0, OptionSpec.vanilla_call(1.08, 0.25), PAPER)
        scaled = call_price(scale, OptionSpec.vanilla_call(1.08 * scale, 0.25), PAPER)
        assert scaled == pytest.approx(scale * base, rel=1e-12)

    def test_quadrature_agrees_with_closed_form(self):
        for strike in (1.02, 1.1, 1.25):
            spec = OptionSpec.vanilla_call(strike, 1 / 12)
            closed = call_price(1.0, spec, PAPER)
            quad = call_price_quadrature(1.0, spec, PAPER)
            assert quad == pytest.approx(closed, rel=1e-8)

    def test_decreasing_and_convex_in_strike(self):
        strikes = [0.8 + 0.02 * i for i in range(41)]
        prices = [call_price(1.0, OptionSpec.vanilla_call(k, 0.5), PAPER) for k in strikes]
        diffs = [b - a for a, b in zip(prices, prices[1:])]
        assert all(d < 0 for d in diffs)
        assert all(b >= a - 1e-15 for a, b in zip(diffs, diffs[1:]))


class TestCallPhysicalMoments:
    def test_equal_drifts_tie_mean_to_price(self):
        spec = OptionSpec.vanilla_call(1.05, 1 / 12)
        mean, _ = call_physical_moments(1.0, spec, FLAT)
        expected = math.exp(FLAT.r * spec.tau) * call_price(1.0, spec, FLAT)
        assert mean == pytest.approx(expected, rel=1e-9)

    def test_zero_strike_mean_is_lognormal_mean(self):
        spec = OptionSpec.vanilla_call(0.0, 0.5)
        mean, _ = call_physical_moments(1.0, spec, PAPER)
        assert mean == pytest.approx(math.exp(PAPER.mu * 0.5), rel=1e-9)

    def test_monte_carlo_oracle(self):
        """sigma=0.3, c=1.1, tau=1/12 under the physical drift."""
        market = MarketParams(mu=0.1, r=0.04, sigma=0.3)
        tau = 1 / 12
        spec = OptionSpec.vanilla_call(1.1, tau)
        m = (market.mu - 0.5 * market.sigma**2) * tau
        s = market.sigma * math.sqrt(tau)
        payoff = np.maximum(lognormal_paths(m, s, 4_000_000, seed=5150) - 1.1, 0.0)
        mean, std = call_physical_moments(1.0, spec, market)
        n = payoff.size
        sample_std = payoff.std(ddof=1)
        mean_se = sample_std / math.sqrt(n)
        assert abs(mean - payoff.mean()) < 3 * mean_se
        # kurtosis-adjusted standard error of the sample std (skewed payoff)
        kurt = (((payoff - payoff.mean()) / sample_std) ** 4).mean()
        std_se = sample_std * math.sqrt((kurt - 1.0) / (4.0 * (n - 1)))
        assert abs(std - sample_std) < 3 * std_se

    def test_scales_linearly_in_spot(self):
        spec_1 = OptionSpec.vanilla_call(1.1, 0.25)
        spec_3 = OptionSpec.vanilla_call(3.3, 0.25)
        mean_1, std_1 = call_physical_moments(1.0, spec_1, PAPER)
        mean_3, std_3 = call_physical_moments(3.0, spec_3, PAPER)
        assert mean_3 == pytest.approx(3 * mean_1, rel=1e-10)
        assert std_3 == pytest.approx(3 * std_1, rel=1e-10)

    def test_quadrature_matches_closed_twin(self):
        spec = OptionSpec.vanilla_call(1.2, 1 / 12)
        market = MarketParams(mu=0.1, r=0.04, sigma=0.4)
        mean_q, std_q = call_physical_moments(1.0, spec, market)
        mean_c, std_c = _call_physical_moments_closed(1.0, spec, market)
        assert mean_q == pytest.approx(mean_c, rel=1e-9)
        assert std_q == pytest.approx(std_c, rel=1e-9)


class TestDigital:
    def test_near_zero_strike_pays_surely(self):
        tau = 1 / 12
        spec = OptionSpec.digital(1e-12, tau)
        assert digital_price(1.0, spec, PAPER) == pytest.approx(math.exp(-PAPER.r * tau), rel=1e-12)
        assert digital_physical_prob(1.0, spec, PAPER) == pytest.approx(1.0, abs=1e-15)

    def test_median_strike_has_half_probability(self):
        tau = 0.5
        strike = math.exp((PAPER.r - 0.5 * PAPER.sigma**2) * tau)
        spec = OptionSpec.digital(strike, tau)
        q_prob = digital_price(1.0, spec, PAPER) * math.exp(PAPER.r * tau)
        assert q_prob == pytest.approx(0.5, rel=1e-12)

    def test_price_bounded_by_discount_factor(self):
        spec = OptionSpec.digital(0.9, 1 / 12)
        price = digital_price(1.0, spec, PAPER)
        assert 0.0 < price <= math.exp(-PAPER.r * spec.tau)

    def test_return_beats_measure_ratio_bound(self):
        spec = OptionSpec.digital(1.1, 1 / 12)
        rate = digital_expected_return(1.0, spec, PAPER)
        bound = digital_return_lower_bound(1.0, spec, PAPER)
        assert rate >= bound > 0.0

    def test_return_increasing_in_strike(self):
        rates = [
            digital_expected_return(1.0, OptionSpec.digital(k, 1 / 12), PAPER)
            for k in (1.05, 1.1, 1.2)
        ]
        assert rates[0] < rates[1] < rates[2]

    def test_equal_drifts_earn_nothing(self):
        for strike in (1.05, 1.2, 2.0):
            spec = OptionSpec.digital(strike, 1 / 12)
            assert digital_expected_return(1.0, spec, FLAT) == pytest.approx(0.0, abs=1e-14)

    def test_at_the_money_short_horizon_limit(self):
        spec = OptionSpec.digital(1.0, 1e-8)
        assert digital_expected_return(1.0, spec, PAPER) == pytest.approx(0.0, abs=1e-4)

    def test_discount_flag_changes_denominator(self):
        spec = OptionSpec.digital(1.1, 1 / 12)
        plain = digital_expected_return(1.0, spec, PAPER)
        discounted = digital_expected_return(1.0, spec, PAPER, discount=True)
        factor = math.exp(PAPER.r * spec.tau)
        assert 1.0 + discounted == pytest.approx((1.0 + plain) * factor, rel=1e-12)

    def test_deep_strike_guard(self):
        spec = OptionSpec.digital(1e6, 1 / 252)
        with pytest.raises(DomainError, match="too deep"):
            digital_expected_return(1.0, spec, PAPER)

    def test_closed_form_matches_quadrature_route_on_full_grid(self):
        """Gaussian-CDF digitals against the p=0 power-call quadrature over
        the whole volatility/strike sweep grid."""
        for sigma in (0.2, 0.3, 0.4, 0.5):
            market = MarketParams(mu=0.1, r=0.04, sigma=sigma)
            for j in range(1, 51):
                strike = 1.0 + 0.005 * j
                digital = OptionSpec.digital(strike, 1 / 12)
                power = OptionSpec.power_call(strike, 0.0, 1 / 12)
                closed = digital_price(1.0, digital, market)
                quad = power_call_price(1.0, power, market, rel_tol=1e-12)
                assert quad == pytest.approx(closed, rel=1e-10)

    def test_return_bound_holds_on_full_grid(self):
        """Expected return >= the measure-ratio lower bound at every sweep
        grid point with a positive risk premium."""
        for sigma in (0.2, 0.3, 0.4, 0.5):
            market = MarketParams(mu=0.1, r=0.04, sigma=sigma)
            for j in range(1, 51):
                spec = OptionSpec.digital(1.0 + 0.005 * j, 1 / 12)
                rate = digital_expected_return(1.0, spec, market)
                assert rate >= digital_return_lower_bound(1.0, spec, market)


class TestDoubleDigital:
    def test_full_window_pays_surely(self):
        tau = 1 / 12
        spec = OptionSpec.double_digital(1e-10, 1e10, tau)
        assert double_digital_price(1.0, spec, PAPER) == pytest.approx(
            math.exp(-PAPER.r * tau), rel=1e-12
        )

    def test_disjoint_windows_add(self):
        tau = 0.25
        left = double_digital_price(1.0, OptionSpec.double_digital(0.9, 1.05, tau), PAPER)
        right = double_digital_price(1.0, OptionSpec.double_digital(1.05, 1.3, tau), PAPER)
        whole = double_digital_price(1.0, OptionSpec.double_digital(0.9, 1.3, tau), PAPER)
        assert left + right == pytest.approx(whole, rel=1e-12)

    def test_shrinking_window_recovers_measure_ratio(self):
        """q/p over [y(1-h), y(1+h)] approaches dQ/dP at ln y."""
        tau, h, level = 1 / 12, 1e-5, 1.1
        spec = OptionSpec.double_digital(level * (1 - h), level * (1 + h), tau)
        q = double_digital_price(1.0, spec, PAPER) * math.exp(PAPER.r * tau)
        p = double_digital_physical_prob(1.0, spec, PAPER)
        expected = rn_ratio(LogReturn(math.log(level), tau), PAPER)
        assert q / p == pytest.approx(expected, rel=1e-3)


class TestPowerCall:
    def test_power_one_is_the_vanilla_call(self):
        for strike in (1.02, 1.2):
            power = OptionSpec.power_call(strike, 1.0, 1 / 12)
            vanilla = OptionSpec.vanilla_call(strike, 1 / 12)
            assert power_call_price(1.0, power, PAPER) == pytest.approx(
                call_price(1.0, vanilla, PAPER), rel=1e-10
            )
            mean_p, std_p = power_call_physical_moments(1.0, power, PAPER)
            mean_v, std_v = call_physical_moments(1.0, vanilla, PAPER)
            assert mean_p == pytest.approx(mean_v, rel=1e-10)
            assert std_p == pytest.approx(std_v, rel=1e-10)

    def test_power_zero_is_the_digital(self):
        power = OptionSpec.power_call(1.1, 0.0, 1 / 12)
        digital = OptionSpec.digital(1.1, 1 / 12)
        assert power_call_price(1.0, power, PAPER, rel_tol=1e-12) == pytest.approx(
            digital_price(1.0, digital, PAPER), rel=1e-10
        )
        mean, _ = power_call_physical_moments(1.0, power, PAPER, rel_tol=1e-12)
        assert mean == pytest.approx(digital_physical_prob(1.0, digital, PAPER), rel=1e-10)

    def test_monte_carlo_oracle_quadratic_payoff(self):
        """p=2, K/spot=1.1, sigma=0.3, tau=1/12."""
        market = MarketParams(mu=0.1, r=0.04, sigma=0.3)
        tau = 1 / 12
        spec = OptionSpec.power_call(1.1, 2.0, tau)
        m = (market.r - 0.5 * market.sigma**2) * tau
        s = market.sigma * math.sqrt(tau)
        payoff = np.maximum(lognormal_paths(m, s, 4_000_000, seed=777) - 1.1, 0.0) ** 2
        disc = math.exp(-market.r * tau)
        mc = disc * payoff.mean()
        se = disc * payoff.std(ddof=1) / math.sqrt(payoff.size)
        assert abs(power_call_price(1.0, spec, market) - mc) < 3 * se

    def test_scales_like_spot_to_the_power(self):
        spec_1 = OptionSpec.power_call(1.1, 2.0, 0.25)
        spec_2 = OptionSpec.power_call(2.2, 2.0, 0.25)
        one = power_call_price(1.0, spec_1, PAPER)
        two = power_call_price(2.0, spec_2, PAPER)
        assert two == pytest.approx(4.0 * one, rel=1e-10)


class TestValuate:
    def test_zero_interest_return_definition(self):
        spec = OptionSpec.digital(1.1, 1 / 12)
        val = valuate(1.0, spec, PAPER)
        assert val.expected_return == pytest.approx(
            digital_expected_return(1.0, spec, PAPER), rel=1e-12
        )
        assert val.physical_std == pytest.approx(
            math.sqrt(val.physical_mean * (1 - val.physical_mean)), rel=1e-12
        )

    def test_interest_conventions_differ_by_discount(self):
        spec = OptionSpec.vanilla_call(1.05, 1 / 12)
        zero = valuate(1.0, spec, PAPER)
        carried = valuate(1.0, spec, PAPER, interest="r")
        assert zero.price == pytest.approx(
            carried.price * math.exp(PAPER.r * spec.tau), rel=1e-12
        )

    def test_worthless_contract_rejected(self):
        spec = OptionSpec.vanilla_call(50.0, 1 / 252)
        with pytest.raises(DomainError):
            valuate(1.0, spec, PAPER)

    def test_positive_price_for_reachable_payoff(self):
        val = valuate(1.0, OptionSpec.double_digital(1.05, 1.2, 1 / 12), PAPER)
        assert val.price > 0.0
        assert val.physical_std >= 0.0

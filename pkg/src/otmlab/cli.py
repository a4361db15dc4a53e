"""Command-line front end: single valuations, measure-ratio curves, the
volatility/strike parameter sweep, strategy simulation, appendix limit
checks, and smile curves. Every command emits CSV (stdout or --out) with a
`#` metadata line recording the full parameterization; identical
configuration and seed produce byte-identical output."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from . import output, strategy
from .errors import DomainError, InfeasibleBudgetError, OtmlabError
from .market import (
    LogReturn,
    MarketParams,
    critical_volatility,
    rn_ratio,
    short_time_ratio,
)
from .options import OptionKind, OptionSpec, valuate
from .smile import SmileParams, default_audit_grid, ratio_bound_audit, ratio_exponent, smile_sigma

_FAMILIES = {
    "call": OptionKind.VANILLA_CALL,
    "digital": OptionKind.DIGITAL,
    "double-digital": OptionKind.DOUBLE_DIGITAL,
    "power": OptionKind.POWER_CALL,
}


def _float_list(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t.strip()]


def _int_list(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t.strip()]


@dataclass(frozen=True)
class _Opt:
    name: str
    cast: object
    default: object
    help: str = ""
    choices: tuple | None = None


_MARKET = [
    _Opt("mu", float, 0.1, "drift per annum"),
    _Opt("r", float, 0.04, "risk-free short rate per annum"),
    _Opt("sigma", float, 0.2, "volatility per sqrt-annum"),
]
_IO = [
    _Opt("config", str, None, "key=value config file; flags override it"),
    _Opt("out", str, None, "CSV output path (default stdout)"),
]

_COMMANDS: dict[str, list[_Opt]] = {
    "price": _MARKET + _IO + [
        _Opt("kind", str, "call", "contract type", tuple(_FAMILIES)),
        _Opt("spot", float, 1.0),
        _Opt("strike", float, 1.1),
        _Opt("lower", float, None, "double-digital window lower edge"),
        _Opt("upper", float, None, "double-digital window upper edge"),
        _Opt("power", float, 1.0, "power-call exponent"),
        _Opt("tau", float, 1.0 / 12.0, "time to maturity, years"),
        _Opt("interest", str, "zero", "cash convention", ("zero", "r")),
    ],
    "ratio": _MARKET + _IO + [
        _Opt("tau", float, 1.0 / 12.0),
        _Opt("x_min", float, -1.0),
        _Opt("x_max", float, 1.0),
        _Opt("x_step", float, 0.05),
        _Opt("svg", str, None, "optional SVG chart path"),
    ],
    "sweep": _MARKET + _IO + [
        _Opt("sigmas", _float_list, [0.2, 0.3, 0.4, 0.5], "volatility rows"),
        _Opt("j_min", int, 1, "first strike step above at-the-money"),
        _Opt("j_max", int, 50, "last strike step; c = 1 + 0.005 j"),
        _Opt("n", int, 12, "holding periods per year"),
        _Opt("family", str, "call", "option family", tuple(_FAMILIES)),
        _Opt("power", float, None),
        _Opt("paths", int, 0, "Monte Carlo paths per row (0 = analytic only)"),
        _Opt("seed", int, 1),
        _Opt("chunk_size", int, 131072),
        _Opt("interest", str, "zero", "cash convention", ("zero", "r")),
        _Opt("beta_regressor", str, "gross", "underlying return used for beta", ("gross", "log")),
        _Opt("svg", str, None),
    ],
    "simulate": _MARKET + _IO + [
        _Opt("n", int, 12),
        _Opt("c", float, None, "strike-to-spot ratio (exclusive with --budget)"),
        _Opt("budget", float, None, "annual budget (exclusive with --c)"),
        _Opt("family", str, "call", "option family", tuple(_FAMILIES)),
        _Opt("power", float, None),
        _Opt("halfwidth", float, 0.05, "double-digital relative half-width"),
        _Opt("notional", float, 1.0),
        _Opt("paths", int, 100_000),
        _Opt("seed", int, 1),
        _Opt("chunk_size", int, 131072),
        _Opt("interest", str, "zero", "cash convention", ("zero", "r")),
        _Opt("beta_regressor", str, "gross", "underlying return used for beta", ("gross", "log")),
    ],
    "appendix": _MARKET + _IO + [
        _Opt("n_list", _int_list, [12, 60, 252, 1000], "bet counts for the growth checks"),
        _Opt("bet_horizon", float, 1.0 / 12.0, "fixed per-bet horizon of the limit construction"),
        _Opt("beta_n_list", _int_list, [12, 240], "period counts for the beta check"),
        _Opt("beta_c", float, 1.05, "fixed strike ratio for the beta check"),
        _Opt("beta_threshold", float, 0.05),
        _Opt("paths", int, 100_000),
        _Opt("seed", int, 1),
    ],
    "smile": _MARKET + _IO + [
        _Opt("sigma0", float, 0.2, "base (at-the-money) volatility"),
        _Opt("bound", float, 2.0, "symmetric ratio bound R"),
        _Opt("r_plus", float, None, "asymmetric upper bound (with --r-minus)"),
        _Opt("r_minus", float, None, "asymmetric lower bound (negative)"),
        _Opt("x_min", float, -5.0),
        _Opt("x_max", float, 5.0),
        _Opt("x_step", float, 0.01),
        _Opt("flat_sigma", float, None, "audit a flat curve at this volatility instead"),
        _Opt("svg", str, None),
    ],
}


def _load_config(path: str) -> dict[str, str]:
    data = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise DomainError(f"config line is not key=value: {raw!r}")
        key, value = line.split("=", 1)
        data[key.strip().replace("-", "_")] = value.strip()
    return data


def _merge(args: argparse.Namespace, opts: list[_Opt]) -> dict:
    file_cfg = _load_config(args.config) if getattr(args, "config", None) else {}
    values = {}
    for opt in opts:
        raw = getattr(args, opt.name)
        if raw is not None:
            values[opt.name] = opt.cast(raw)
        elif opt.name in file_cfg:
            values[opt.name] = opt.cast(file_cfg[opt.name])
        else:
            values[opt.name] = opt.default
        if opt.choices and values[opt.name] is not None and values[opt.name] not in opt.choices:
            raise DomainError(f"{opt.name} must be one of {opt.choices}, got {values[opt.name]!r}")
    return values


def _metadata(command: str, values: dict) -> str:
    skip = {"config", "out", "svg"}
    parts = [command]
    for key in sorted(values):
        if key in skip:
            continue
        value = values[key]
        if isinstance(value, list):
            parts.append(f"{key}={','.join(output.fmt(v) for v in value)}")
        else:
            parts.append(f"{key}={output.fmt(value)}")
    return " ".join(parts)


def _market(values: dict) -> MarketParams:
    return MarketParams(mu=values["mu"], r=values["r"], sigma=values["sigma"])


def _grid(lo: float, hi: float, step: float) -> list[float]:
    if step <= 0 or hi < lo:
        raise DomainError(f"bad grid: [{lo}, {hi}] step {step}")
    count = int(round((hi - lo) / step))
    return [lo + step * i for i in range(count + 1)]


def _spec_from(values: dict) -> OptionSpec:
    kind = _FAMILIES[values["kind"]]
    if kind is OptionKind.VANILLA_CALL:
        return OptionSpec.vanilla_call(values["strike"], values["tau"])
    if kind is OptionKind.DIGITAL:
        return OptionSpec.digital(values["strike"], values["tau"])
    if kind is OptionKind.DOUBLE_DIGITAL:
        if values["lower"] is None or values["upper"] is None:
            raise DomainError("double-digital pricing needs --lower and --upper")
        return OptionSpec.double_digital(values["lower"], values["upper"], values["tau"])
    return OptionSpec.power_call(values["strike"], values["power"], values["tau"])


def _cmd_price(args: argparse.Namespace) -> int:
    values = _merge(args, _COMMANDS["price"])
    spec = _spec_from(values)
    val = valuate(values["spot"], spec, _market(values), interest=values["interest"])
    lower, upper = spec.interval if spec.interval else (None, None)
    header = ["kind", "spot", "strike", "lower", "upper", "power", "tau",
              "price", "physical_mean", "physical_std", "expected_return"]
    row = [values["kind"], values["spot"], spec.strike, lower, upper, spec.power,
           spec.tau, val.price, val.physical_mean, val.physical_std, val.expected_return]
    output.write_csv(values["out"], _metadata("price", values), header, [row])
    return 0


def _cmd_ratio(args: argparse.Namespace) -> int:
    values = _merge(args, _COMMANDS["ratio"])
    market = _market(values)
    xs = _grid(values["x_min"], values["x_max"], values["x_step"])
    rows = [
        (x, rn_ratio(LogReturn(x, values["tau"]), market), short_time_ratio(x, market))
        for x in xs
    ]
    meta = _metadata("ratio", values)
    if market.mu + market.r > 0:
        meta += f" critical_volatility={output.fmt(critical_volatility(market))}"
    output.write_csv(values["out"], meta, ["x", "rn_ratio", "short_time_ratio"], rows)
    if values["svg"]:
        output.svg_line_chart(
            values["svg"], xs,
            {"rn_ratio": [r[1] for r in rows], "short_time_ratio": [r[2] for r in rows]},
            title=f"measure ratio, tau={output.fmt(values['tau'])}",
        )
    return 0


def _strategy_config(values: dict, market: MarketParams, c: float | None, budget: float | None) -> strategy.StrategyConfig:
    return strategy.StrategyConfig(
        n=values["n"],
        market=market,
        family=_FAMILIES[values["family"]],
        strike_ratio=c,
        budget=budget,
        power=values.get("power"),
        interval_halfwidth=values.get("halfwidth", 0.05),
        notional=values.get("notional", 1.0),
        interest=values["interest"],
        beta_regressor=values.get("beta_regressor", "gross"),
    )


def _cmd_sweep(args: argparse.Namespace) -> int:
    values = _merge(args, _COMMANDS["sweep"])
    if not values["sigmas"]:
        raise DomainError("sigma list must be non-empty")
    if not (1 <= values["j_min"] <= values["j_max"]):
        raise DomainError(f"bad strike steps: j_min={values['j_min']} j_max={values['j_max']}")
    header = ["sigma", "j", "c", "implied_budget", "expected_return_pct", "sharpe",
              "beta", "beta_se", "mc_sharpe", "mc_sharpe_se", "status"]
    rows = []
    row_index = 0
    for sigma in values["sigmas"]:
        market = MarketParams(mu=values["mu"], r=values["r"], sigma=sigma)
        for j in range(values["j_min"], values["j_max"] + 1):
            c = 1.0 + 0.005 * j
            cfg = _strategy_config(values, market, c, None)
            try:
                stats = strategy.analytic_annual_stats(cfg)
            except (InfeasibleBudgetError, DomainError) as exc:
                rows.append([sigma, j, c, None, None, None, None, None, None, None,
                             f"infeasible: {exc}"])
                row_index += 1
                continue
            ret_pct = 100.0 * (stats.expected_payoff / stats.budget - 1.0)
            beta = beta_se = mc_sharpe = mc_sharpe_se = None
            if values["paths"] > 0:
                sim = strategy.simulate(
                    cfg, values["paths"], values["seed"] + row_index,
                    chunk_size=values["chunk_size"],
                )
                beta, beta_se = sim.stats.beta, sim.stats.beta_se
                mc_sharpe, mc_sharpe_se = sim.stats.sharpe, sim.stats.sharpe_se
            rows.append([sigma, j, c, stats.budget, ret_pct, stats.sharpe,
                         beta, beta_se, mc_sharpe, mc_sharpe_se, "ok"])
            row_index += 1
    output.write_csv(values["out"], _metadata("sweep", values), header, rows)
    if values["svg"]:
        js = list(range(values["j_min"], values["j_max"] + 1))
        series = {}
        for sigma in values["sigmas"]:
            series[f"sigma={output.fmt(sigma)}"] = [
                row[4] for row in rows if row[0] == sigma and row[4] is not None
            ]
        output.svg_line_chart(values["svg"], js, series,
                              title="expected annual return, % vs strike step j")
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    values = _merge(args, _COMMANDS["simulate"])
    market = _market(values)
    cfg = _strategy_config(values, market, values["c"], values["budget"])
    analytic = strategy.analytic_annual_stats(cfg)
    sim = strategy.simulate(cfg, values["paths"], values["seed"], chunk_size=values["chunk_size"])
    s = sim.stats
    header = ["n", "strike_ratio", "budget", "family", "paths", "seed",
              "analytic_mean", "analytic_std", "analytic_sharpe",
              "mc_mean", "mc_mean_se", "mc_std", "mc_std_se",
              "mc_sharpe", "mc_sharpe_se", "beta", "beta_se",
              "lag1_autocorr", "lag1_autocorr_se"]
    row = [cfg.n, s.strike_ratio, s.budget, values["family"], values["paths"], values["seed"],
           analytic.expected_payoff, analytic.payoff_std, analytic.sharpe,
           s.expected_payoff, s.expected_payoff_se, s.payoff_std, s.payoff_std_se,
           s.sharpe, s.sharpe_se, s.beta, s.beta_se,
           sim.lag1_autocorr, sim.lag1_autocorr_se]
    output.write_csv(values["out"], _metadata("simulate", values), header, [row])
    return 0


def _cmd_appendix(args: argparse.Namespace) -> int:
    values = _merge(args, _COMMANDS["appendix"])
    market = _market(values)
    growth = strategy.strike_ratio_growth(
        values["n_list"], market, bet_horizon=values["bet_horizon"]
    )
    ratios = strategy.prob_ratio_growth(
        values["n_list"], market, bet_horizon=values["bet_horizon"]
    )
    beta_cfg = strategy.StrategyConfig(
        n=values["beta_n_list"][0], market=market, family=OptionKind.DIGITAL,
        strike_ratio=values["beta_c"],
    )
    betas = strategy.beta_convergence(
        beta_cfg, values["beta_n_list"], values["paths"], values["seed"]
    )
    rows = [("strike_ratio", n, c, None) for n, c in growth]
    rows += [("prob_ratio", n, ratio, None) for n, ratio in ratios]
    rows += [("payoff_corr", n, corr, se) for n, corr, se in betas]
    output.write_csv(values["out"], _metadata("appendix", values),
                     ["check", "n", "value", "se"], rows)

    cs = [c for _, c in growth]
    pqs = [v for _, v in ratios]
    corrs = [abs(v) for _, v, _ in betas]
    checks = [
        ("strike_ratio_growth strictly increasing",
         all(b > a for a, b in zip(cs, cs[1:])),
         " -> ".join(output.fmt(v) for v in cs)),
        ("prob_ratio_growth strictly increasing",
         all(b > a for a, b in zip(pqs, pqs[1:])),
         " -> ".join(output.fmt(v) for v in pqs)),
        (f"payoff-underlying correlation at n={values['beta_n_list'][-1]} below "
         f"{values['beta_threshold']} and decreasing",
         corrs[-1] < values["beta_threshold"] and corrs[-1] < corrs[0],
         " -> ".join(output.fmt(v) for v in corrs)),
    ]
    for name, ok, detail in checks:
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    return 0


def _cmd_smile(args: argparse.Namespace) -> int:
    values = _merge(args, _COMMANDS["smile"])
    market = _market(values)
    if (values["r_plus"] is None) != (values["r_minus"] is None):
        raise DomainError("provide both --r-plus and --r-minus, or neither")
    if values["r_plus"] is not None:
        params = SmileParams(values["sigma0"], values["r_plus"], values["r_minus"])
    else:
        params = SmileParams.with_symmetric_bound(values["sigma0"], values["bound"])
    xs = _grid(values["x_min"], values["x_max"], values["x_step"])
    if values["flat_sigma"] is not None:
        curve = lambda x: values["flat_sigma"]  # noqa: E731
        label = "flat"
    else:
        curve = lambda x: smile_sigma(x, params, market)  # noqa: E731
        label = "smile"
        curve(1.0)  # surfaces the mu <= r refusal before any output
    report = ratio_bound_audit(curve, params, market, xs)
    rows = [
        (x, curve(x), rho, not (params.r_minus < rho < params.r_plus))
        for x, rho in zip(report.x_grid, report.ratios)
    ]
    meta = _metadata("smile", values) + f" curve={label} symmetric={output.fmt(params.symmetric)}"
    output.write_csv(values["out"], meta, ["x", "sigma", "ratio_exponent", "violation"], rows)
    verdict = "PASS" if report.passed else "FAIL"
    print(f"{verdict} ratio bound audit ({label} curve): {len(report.violations)} violations "
          f"on [{output.fmt(values['x_min'])}, {output.fmt(values['x_max'])}]")
    if values["svg"]:
        output.svg_line_chart(values["svg"], xs, {"sigma": [r[1] for r in rows]},
                              title=f"{label} volatility vs log-moneyness")
    return 0


_HANDLERS = {
    "price": _cmd_price,
    "ratio": _cmd_ratio,
    "sweep": _cmd_sweep,
    "simulate": _cmd_simulate,
    "appendix": _cmd_appendix,
    "smile": _cmd_smile,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="otmlab",
        description="Black-Scholes-Merton measure analytics, an out-of-the-money "
                    "option strategy, and a structural volatility smile.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command, opts in _COMMANDS.items():
        sub = subparsers.add_parser(command)
        for opt in opts:
            sub.add_argument(f"--{opt.name.replace('_', '-')}", dest=opt.name,
                             default=None, help=opt.help)
        sub.set_defaults(func=_HANDLERS[command])
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except OtmlabError as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(json.dumps({"error": f"{type(exc).__name__}: {exc}"}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

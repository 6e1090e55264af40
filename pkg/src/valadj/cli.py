"""Command-line front end.

``valadj run <config.json>`` solves the configured regime for every
sweep point and writes two CSV reports; ``valadj validate <config.json>``
only parses and checks the config.  Exit codes: 0 success, 2 config
error, 3 numeric failure.  Output is byte-deterministic for a fixed
config and seed: floats are written with ``repr`` (shortest round-trip)
and no timestamps are emitted.

Sweep points are independent pure computations; they are executed in
config order and reported in that order.  The Monte Carlo seed for
sweep point ``i`` is ``seed + i``.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .credit import CreditCurve, JointDefaultModel
from .curves import MarketRates, TermCurve
from .engine import (
    DEFAULT_PANELS_PER_YEAR,
    REGIME_CORRELATED,
    REGIME_INDEPENDENT,
    REGIME_RISKFREE_CPTY,
    adjustment_correlated,
    adjustment_independent,
    adjustment_riskfree_cpty,
)
from .errors import InvariantError
from .instruments import CashflowSchedule, CloseoutSpec
from .oracle import (
    mc_value_correlated,
    mc_value_independent,
    mc_value_riskfree_cpty,
)

__all__ = ["ScenarioConfig", "ConfigError", "load_config", "run_scenario", "main"]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

REGIMES = (REGIME_RISKFREE_CPTY, REGIME_INDEPENDENT, REGIME_CORRELATED)

PROFILE_COLUMNS = (
    "regime,lambda_bar_I,theta,t,v_X,u,v,alpha,beta,mc_mean,mc_stderr"
)
SUMMARY_COLUMNS = (
    "regime,lambda_bar_I,theta,v_X0,u0,v0,mc_mean,mc_stderr,mc_paths,mc_seed"
)


class ConfigError(ValueError):
    """Config rejected; ``diagnostics`` lists every problem found."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(self.diagnostics))


@dataclass(frozen=True)
class ScenarioConfig:
    market: MarketRates
    investor: CreditCurve
    counterparty: CreditCurve | None
    bond_recovery: float
    closeout: CloseoutSpec
    schedule: CashflowSchedule
    regime: str
    lambda_bar_sweep: tuple[TermCurve, ...]
    theta_sweep: tuple[float, ...]
    panels_per_year: int
    mc_paths: int
    seed: int
    profiles_out: str
    summary_out: str

    def to_json_dict(self) -> dict:
        """Canonical JSON form; parsing it back yields an equal config."""
        d = {
            "market": {
                "risk_free": _curve_nodes(self.market.risk_free),
                "collateral": _curve_nodes(self.market.collateral),
            },
            "credit": {"investor": _curve_nodes(self.investor.intensity)},
            "bond_recovery": self.bond_recovery,
            "closeout": {
                "recovery_investor": self.closeout.recovery_investor,
                "recovery_counterparty": self.closeout.recovery_counterparty,
            },
            "schedule": {
                "flows": [
                    {"t": t, "amount": a}
                    for t, a in zip(self.schedule.times, self.schedule.amounts)
                ],
                "maturity": self.schedule.maturity,
            },
            "regime": self.regime,
            "sweep": {},
            "numerics": {
                "panels_per_year": self.panels_per_year,
                "mc_paths": self.mc_paths,
                "seed": self.seed,
            },
            "output": {"profiles": self.profiles_out, "summary": self.summary_out},
        }
        if self.counterparty is not None:
            d["credit"]["counterparty"] = _curve_nodes(self.counterparty.intensity)
        if self.regime == REGIME_CORRELATED:
            d["sweep"]["theta"] = list(self.theta_sweep)
        else:
            d["sweep"]["lambda_bar"] = [_curve_nodes(c) for c in self.lambda_bar_sweep]
        return d


def _curve_nodes(curve: TermCurve) -> list[dict]:
    return [{"t": t, "value": v} for t, v in zip(curve.times, curve.values)]


def _parse_curve(raw, label: str, diags: list) -> TermCurve | None:
    try:
        if isinstance(raw, (int, float)) and not isinstance(raw, bool):
            return TermCurve.flat(raw)
        if isinstance(raw, list):
            return TermCurve.from_nodes((node["t"], node["value"]) for node in raw)
        raise ValueError("expected a number or a list of {t, value} nodes")
    except (ValueError, TypeError, KeyError) as exc:
        diags.append(f"{label}: {exc}")
        return None


def _parse_config_dict(doc: dict) -> ScenarioConfig:
    diags: list[str] = []
    if not isinstance(doc, dict):
        raise ConfigError(["config root must be a JSON object"])

    market_doc = doc.get("market") or {}
    risk_free = _parse_curve(market_doc.get("risk_free"), "market.risk_free", diags)
    collateral = _parse_curve(market_doc.get("collateral"), "market.collateral", diags)
    market = (
        MarketRates(risk_free, collateral)
        if risk_free is not None and collateral is not None
        else None
    )

    credit_doc = doc.get("credit") or {}
    investor = None
    inv_curve = _parse_curve(credit_doc.get("investor"), "credit.investor", diags)
    if inv_curve is not None:
        try:
            investor = CreditCurve("I", inv_curve)
        except ValueError as exc:
            diags.append(f"credit.investor: {exc}")
    counterparty = None
    if credit_doc.get("counterparty") is not None:
        cpty_curve = _parse_curve(
            credit_doc.get("counterparty"), "credit.counterparty", diags
        )
        if cpty_curve is not None:
            try:
                counterparty = CreditCurve("C", cpty_curve)
            except ValueError as exc:
                diags.append(f"credit.counterparty: {exc}")

    bond_recovery = doc.get("bond_recovery", 0.0)
    if not isinstance(bond_recovery, (int, float)) or isinstance(bond_recovery, bool) or not (
        math.isfinite(bond_recovery) and 0.0 <= bond_recovery <= 1.0
    ):
        diags.append("bond_recovery: recovery out of range [0, 1]")
        bond_recovery = 0.0

    closeout = None
    closeout_doc = doc.get("closeout") or {}
    try:
        closeout = CloseoutSpec(
            recovery_investor=closeout_doc.get("recovery_investor", 0.0),
            recovery_counterparty=closeout_doc.get("recovery_counterparty", 0.0),
        )
    except (ValueError, TypeError) as exc:
        diags.append(f"closeout: {exc}")

    schedule = None
    schedule_doc = doc.get("schedule") or {}
    try:
        flows = [(f["t"], f["amount"]) for f in schedule_doc.get("flows", [])]
        schedule = CashflowSchedule.from_flows(flows, schedule_doc.get("maturity"))
    except (ValueError, TypeError, KeyError) as exc:
        diags.append(f"schedule: {exc}")

    regime = doc.get("regime")
    if regime not in REGIMES:
        diags.append(f"regime: must be one of {', '.join(REGIMES)}")

    sweep_doc = doc.get("sweep") or {}
    lambda_bar_sweep: list[TermCurve] = []
    theta_sweep: list[float] = []
    if regime == REGIME_CORRELATED:
        if sweep_doc.get("lambda_bar"):
            diags.append("sweep.lambda_bar: not used by the correlated regime")
        thetas = sweep_doc.get("theta")
        if not thetas:
            diags.append("sweep.theta: correlated regime needs at least one theta")
        else:
            for i, th in enumerate(thetas):
                if (
                    not isinstance(th, (int, float))
                    or isinstance(th, bool)
                    or not math.isfinite(th)
                    or th < 0
                ):
                    diags.append(f"sweep.theta[{i}]: must be a finite number >= 0")
                else:
                    theta_sweep.append(float(th))
        if bond_recovery != 0.0:
            diags.append("bond_recovery: correlated regime requires zero bond recovery")
    elif regime in REGIMES:
        if sweep_doc.get("theta"):
            diags.append(f"sweep.theta: not used by the {regime} regime")
        lams = sweep_doc.get("lambda_bar")
        if not lams:
            diags.append(
                "sweep.lambda_bar: this regime needs at least one lambda_bar_I entry"
            )
        else:
            for i, raw in enumerate(lams):
                curve = _parse_curve(raw, f"sweep.lambda_bar[{i}]", diags)
                if curve is not None:
                    if any(v < 0.0 for v in curve.values):
                        diags.append(f"sweep.lambda_bar[{i}]: must be non-negative")
                    else:
                        lambda_bar_sweep.append(curve)

    if regime in (REGIME_INDEPENDENT, REGIME_CORRELATED) and counterparty is None:
        diags.append(f"credit.counterparty: required by the {regime} regime")
    if investor is None and not any(d.startswith("credit.investor") for d in diags):
        diags.append("credit.investor: required")

    numerics = doc.get("numerics") or {}
    panels = numerics.get("panels_per_year", DEFAULT_PANELS_PER_YEAR)
    if not isinstance(panels, int) or isinstance(panels, bool) or panels < 1:
        diags.append("numerics.panels_per_year: must be a positive integer")
        panels = DEFAULT_PANELS_PER_YEAR
    mc_paths = numerics.get("mc_paths", 100_000)
    if not isinstance(mc_paths, int) or isinstance(mc_paths, bool) or mc_paths < 2:
        diags.append("numerics.mc_paths: must be an integer >= 2")
        mc_paths = 2
    seed = numerics.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        diags.append("numerics.seed: must be a non-negative integer")
        seed = 0

    output = doc.get("output") or {}
    profiles_out = output.get("profiles", "profiles.csv")
    summary_out = output.get("summary", "summary.csv")

    if diags or market is None or investor is None or closeout is None or schedule is None:
        raise ConfigError(diags or ["invalid config"])

    return ScenarioConfig(
        market=market,
        investor=investor,
        counterparty=counterparty,
        bond_recovery=float(bond_recovery),
        closeout=closeout,
        schedule=schedule,
        regime=regime,
        lambda_bar_sweep=tuple(lambda_bar_sweep),
        theta_sweep=tuple(theta_sweep),
        panels_per_year=panels,
        mc_paths=mc_paths,
        seed=seed,
        profiles_out=str(profiles_out),
        summary_out=str(summary_out),
    )


def load_config(path) -> ScenarioConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError([f"cannot read config: {exc}"]) from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError([f"invalid JSON: {exc}"]) from exc
    return _parse_config_dict(doc)


# -- report helpers ----------------------------------------------------


def _fmt(x) -> str:
    return repr(float(x))


def _lambda_label(curve: TermCurve) -> str:
    if len(curve.times) == 1:
        return _fmt(curve.values[0])
    nodes = ";".join(f"{_fmt(t)}:{_fmt(v)}" for t, v in zip(curve.times, curve.values))
    return f"piecewise({nodes})"


def _sweep_points(cfg: ScenarioConfig):
    """Yield ``(lambda_label, theta_label, solve, simulate)`` per point."""
    if cfg.regime == REGIME_CORRELATED:
        for theta in cfg.theta_sweep:
            model = JointDefaultModel(cfg.investor, cfg.counterparty, theta)
            yield (
                _fmt(0.0),
                _fmt(theta),
                lambda ppy, m=model: adjustment_correlated(
                    cfg.market, m, cfg.schedule, cfg.closeout, panels_per_year=ppy
                ),
                lambda n, s, m=model: mc_value_correlated(
                    cfg.market, m, cfg.schedule, cfg.closeout, n, s
                ),
            )
    elif cfg.regime == REGIME_INDEPENDENT:
        for lam in cfg.lambda_bar_sweep:
            yield (
                _lambda_label(lam),
                "",
                lambda ppy, lam=lam: adjustment_independent(
                    cfg.market,
                    cfg.investor,
                    cfg.counterparty,
                    cfg.bond_recovery,
                    lam,
                    cfg.schedule,
                    cfg.closeout,
                    panels_per_year=ppy,
                ),
                lambda n, s, lam=lam: mc_value_independent(
                    cfg.market,
                    cfg.investor,
                    cfg.counterparty,
                    cfg.bond_recovery,
                    lam,
                    cfg.schedule,
                    cfg.closeout,
                    n,
                    s,
                ),
            )
    else:
        for lam in cfg.lambda_bar_sweep:
            yield (
                _lambda_label(lam),
                "",
                lambda ppy, lam=lam: adjustment_riskfree_cpty(
                    cfg.market,
                    cfg.investor,
                    cfg.bond_recovery,
                    lam,
                    cfg.schedule,
                    cfg.closeout,
                    panels_per_year=ppy,
                ),
                lambda n, s, lam=lam: mc_value_riskfree_cpty(
                    cfg.market,
                    cfg.investor,
                    cfg.bond_recovery,
                    lam,
                    cfg.schedule,
                    cfg.closeout,
                    n,
                    s,
                ),
            )


def run_scenario(
    cfg: ScenarioConfig,
    *,
    with_mc: bool = False,
    out_dir=None,
    panels_per_year: int | None = None,
    echo=print,
) -> tuple[Path, Path]:
    """Solve every sweep point and write the profile and summary CSVs.

    Returns the paths written.  Rows appear in config order; the Monte
    Carlo columns are populated on the ``t = 0`` profile row of each
    sweep point (the estimate targets the time-0 value) and stay empty
    when simulation is off.
    """
    ppy = panels_per_year if panels_per_year is not None else cfg.panels_per_year
    base = Path(out_dir) if out_dir is not None else Path(".")
    base.mkdir(parents=True, exist_ok=True)
    profile_lines = [PROFILE_COLUMNS]
    summary_lines = [SUMMARY_COLUMNS]

    for i, (lam_label, theta_label, solve, simulate) in enumerate(_sweep_points(cfg)):
        profile = solve(ppy)
        mc_mean = mc_err = ""
        mc_paths = mc_seed = ""
        if with_mc:
            est = simulate(cfg.mc_paths, cfg.seed + i)
            mc_mean, mc_err = _fmt(est.mean), _fmt(est.std_error)
            mc_paths, mc_seed = str(est.paths), str(est.seed)
        for j, t in enumerate(profile.grid):
            first = j == 0
            profile_lines.append(
                ",".join(
                    (
                        cfg.regime,
                        lam_label,
                        theta_label,
                        _fmt(t),
                        _fmt(profile.v_x[j]),
                        _fmt(profile.u[j]),
                        _fmt(profile.v[j]),
                        _fmt(profile.alpha[j]),
                        _fmt(profile.beta[j]),
                        mc_mean if first else "",
                        mc_err if first else "",
                    )
                )
            )
        summary_lines.append(
            ",".join(
                (
                    cfg.regime,
                    lam_label,
                    theta_label,
                    _fmt(profile.v_x[0]),
                    _fmt(profile.u[0]),
                    _fmt(profile.v[0]),
                    mc_mean,
                    mc_err,
                    mc_paths,
                    mc_seed,
                )
            )
        )
        mc_note = f" mc={mc_mean}+-{mc_err}" if with_mc else ""
        echo(
            f"{cfg.regime} lambda_bar_I={lam_label}"
            + (f" theta={theta_label}" if theta_label else "")
            + f" u0={_fmt(profile.u[0])} v0={_fmt(profile.v[0])}{mc_note}"
        )

    profiles_path = base / cfg.profiles_out
    summary_path = base / cfg.summary_out
    profiles_path.write_text("\n".join(profile_lines) + "\n")
    summary_path.write_text("\n".join(summary_lines) + "\n")
    return profiles_path, summary_path


def _fail(code: int, kind: str, detail: str, diagnostics=()) -> int:
    payload = {"error": kind, "detail": detail}
    if diagnostics:
        payload["diagnostics"] = list(diagnostics)
    print(json.dumps(payload), file=sys.stderr)
    return code


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="valadj",
        description="Value adjustments for deterministic cashflow streams.",
    )
    parser.add_argument("--version", action="version", version=f"valadj {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="solve a scenario config and write CSV reports")
    run_p.add_argument("config")
    run_p.add_argument("--mc", action="store_true", help="also run the Monte Carlo check")
    run_p.add_argument("--out", default=None, help="output directory (default: cwd)")
    run_p.add_argument(
        "--panels", type=int, default=None, help="override panels per year"
    )

    val_p = sub.add_parser("validate", help="parse a config and report problems")
    val_p.add_argument("config")

    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, "config", str(exc), exc.diagnostics)

    if args.command == "validate":
        print("config ok")
        return EXIT_OK

    if args.panels is not None and args.panels < 1:
        return _fail(EXIT_CONFIG, "config", "--panels must be a positive integer")
    try:
        run_scenario(
            cfg, with_mc=args.mc, out_dir=args.out, panels_per_year=args.panels
        )
    except InvariantError as exc:
        return _fail(EXIT_NUMERIC, "numeric", str(exc))
    except (FloatingPointError, ArithmeticError) as exc:
        return _fail(EXIT_NUMERIC, "numeric", str(exc))
    except ValueError as exc:
        return _fail(EXIT_CONFIG, "config", str(exc))
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())

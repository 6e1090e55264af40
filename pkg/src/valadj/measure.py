"""Pricing measures consistent with the investor's funding bond.

The only own-credit instrument observed in the market is the investor's
funding bond, which prices off the funding rate

    r_F(t) = r(t) + (1 - R_I) * lam_I(t)

with bond recovery ``R_I``.  That single quote does not pin down the
investor's default intensity and short rate separately, so the investor
may price under any internal pair ``(lam_bar_I, r_bar)`` that keeps the
funding rate unchanged:

    r_bar + (1 - R_I) * lam_bar_I = r + (1 - R_I) * lam_I.

Every such pair reprices the funding bond identically; they differ in
how value is split between borrowing cost and default compensation.
``lam_bar_I = 0`` (the investor treats itself as default-free) is an
admissible limiting choice.

When the counterparty can also default and the two default times are
dependent, the analogue of the funding bond is a zero-recovery bond
whose payoff is contingent on counterparty survival.  Conditional on
the counterparty's default time ``t_C``, the bond's discounted payoff
is deterministic:

    Dbar(0,T_I)[t_C] = D(0,T_I) * dU(T_I, t_C)/dt_C / (dU_C(t_C)/dt_C)   if t_C < T_I
    Dbar(0,T_I)[t_C] = D(0,T_I) * U(T_I, T_I) / U_C(T_I)                 if t_C >= T_I

and integrating it against the law of ``t_C`` recovers the market price
``D(0,T_I) * U(T_I, T_C)``.  The implied pre-default growth rate of the
contingent bank account is

    r_pre(t) = r(t) + FTD_I(t) + FTD_C(t) - lam_C(t).

With independent defaults this collapses to ``r + lam_I``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .credit import CreditCurve, JointDefaultModel
from .curves import MarketRates, TermCurve, as_curve, combined
from .errors import InvariantError

__all__ = [
    "BondSpec",
    "InternalMeasure",
    "MODE_RISKFREE_CPTY",
    "MODE_CORRELATED",
    "funding_rate",
    "internal_rate",
    "bond_price",
    "pre_default_rate",
    "conditional_discount",
    "expected_conditional_discount",
    "reprice_contingent_bond",
    "riskfree_counterparty_measure",
    "correlated_zero_recovery_measure",
]

MODE_RISKFREE_CPTY = "riskfree_cpty"
MODE_CORRELATED = "correlated"

#: panels used by the deterministic quadrature against the tau_C law
QUADRATURE_PANELS = 2000


def _check_recovery(recovery: float, label: str = "recovery") -> float:
    rec = float(recovery)
    if not (math.isfinite(rec) and 0.0 <= rec <= 1.0):
        raise ValueError(f"{label}: recovery out of range [0, 1]")
    return rec


def funding_rate(market: MarketRates, investor: CreditCurve, recovery_bond: float) -> TermCurve:
    """Rate the investor pays on unsecured borrowing,
    ``r + (1 - R_I) * lam_I``."""
    rec = _check_recovery(recovery_bond, "bond recovery")
    return combined(
        (market.risk_free, investor.intensity), lambda r, lam: r + (1.0 - rec) * lam
    )


def internal_rate(
    market: MarketRates,
    investor: CreditCurve,
    recovery_bond: float,
    lambda_bar,
) -> TermCurve:
    """Internal short rate paired with the chosen ``lam_bar_I``.

    Solves the funding-rate constraint for ``r_bar``; by construction
    ``r_bar + (1 - R_I) lam_bar_I`` reproduces ``funding_rate`` exactly.
    """
    rec = _check_recovery(recovery_bond, "bond recovery")
    lam_bar = as_curve(lambda_bar)
    if any(v < 0.0 for v in lam_bar.values):
        raise ValueError("internal default intensity must be non-negative")
    r_f = funding_rate(market, investor, rec)
    return combined((r_f, lam_bar), lambda f, lb: f - (1.0 - rec) * lb)


def bond_price(
    market: MarketRates, investor: CreditCurve, recovery_bond: float, maturity: float
) -> float:
    """Time-0 price of the investor's unit funding bond,
    ``exp(-int_0^T r_F)``."""
    if not (math.isfinite(maturity) and maturity > 0.0):
        raise ValueError("bond maturity must be positive")
    return funding_rate(market, investor, recovery_bond).discount_factor(0.0, maturity)


def pre_default_rate(market: MarketRates, model: JointDefaultModel) -> Callable:
    """Growth rate of the survival-contingent bank account,
    ``r + FTD_I + FTD_C - lam_C``.  Returns a vectorized callable of t."""

    inv = model.investor.name
    cpty = model.counterparty.name

    def rate(t):
        return (
            market.risk_free.value(t)
            + model.ftd_intensity(inv, t)
            + model.ftd_intensity(cpty, t)
            - model.counterparty.hazard(t)
        )

    return rate


def _survival_branch(market: MarketRates, model: JointDefaultModel, horizon: float) -> float:
    """Dbar(0,T_I) on the event the counterparty outlives the horizon."""
    d = market.risk_free.discount_factor(0.0, horizon)
    log_ratio = model.log_joint_survival(horizon, horizon) + model.counterparty.cumulative_hazard(horizon)
    return d * math.exp(log_ratio)


def _default_branch(market: MarketRates, model: JointDefaultModel, horizon: float, t_c):
    """Dbar(0,T_I) given default at ``t_c < horizon``.  Vectorized."""
    t_arr = np.asarray(t_c, dtype=float)
    lam_c = np.asarray(model.counterparty.hazard(t_arr), dtype=float)
    if np.any(lam_c <= 0.0):
        raise ValueError(
            "conditional discount is singular where the counterparty intensity vanishes"
        )
    d = market.risk_free.discount_factor(0.0, horizon)
    dens = lam_c * np.exp(-np.asarray(model.counterparty.cumulative_hazard(t_arr)))
    out = d * (-np.asarray(model.joint_survival_partial_tc(horizon, t_arr))) / dens
    return float(out) if out.ndim == 0 else out


def conditional_discount(
    market: MarketRates, model: JointDefaultModel, horizon: float, default_time: float
) -> float:
    """Discounted payoff of the zero-recovery contingent bond, given the
    counterparty default time.

    Parameters
    ----------
    horizon : float
        Bond maturity ``T_I > 0``.
    default_time : float
        Realized ``tau_C``; ``inf`` (or anything ``>= horizon``) selects
        the survival branch.  A default exactly at the horizon settles
        on the survival branch.

    With ``theta = 0`` the result does not depend on ``default_time`` at
    all and equals ``D(0,T_I) * U_I(T_I)``.
    """
    if not (math.isfinite(horizon) and horizon > 0.0):
        raise ValueError("horizon must be positive")
    if default_time < 0.0 or math.isnan(default_time):
        raise ValueError("default time must be non-negative")
    if default_time < horizon:
        return float(_default_branch(market, model, horizon, default_time))
    return _survival_branch(market, model, horizon)


def _composite_simpson(f: Callable, a: float, b: float, panels: int) -> float:
    if b <= a:
        return 0.0
    xs = np.linspace(a, b, 2 * panels + 1)
    ys = np.asarray(f(xs), dtype=float)
    h = (b - a) / panels
    return h / 6.0 * (ys[0] + ys[-1] + 4.0 * np.sum(ys[1::2]) + 2.0 * np.sum(ys[2:-1:2]))


def expected_conditional_discount(
    market: MarketRates,
    model: JointDefaultModel,
    horizon: float,
    *,
    contingency: float = 0.0,
    panels: int = QUADRATURE_PANELS,
) -> float:
    """Integrate the conditional discount against the law of ``tau_C``,
    restricted to ``tau_C > contingency``.

    Composite Simpson over ``[contingency, horizon]`` plus the exact tail
    mass ``U_C(horizon)`` times the survival branch.  With
    ``contingency = 0`` this equals ``D(0,T_I) * U_I(T_I)`` up to
    quadrature error.
    """
    if not (math.isfinite(horizon) and horizon > 0.0):
        raise ValueError("horizon must be positive")
    if not (0.0 <= contingency < horizon):
        raise ValueError("need 0 <= contingency < horizon")

    def integrand(ts):
        lam_c = np.asarray(model.counterparty.hazard(ts), dtype=float)
        u_c = np.exp(-np.asarray(model.counterparty.cumulative_hazard(ts)))
        return _default_branch(market, model, horizon, ts) * lam_c * u_c

    body = _composite_simpson(integrand, contingency, horizon, panels)
    tail = math.exp(-model.counterparty.cumulative_hazard(horizon)) * _survival_branch(
        market, model, horizon
    )
    return body + tail


@dataclass(frozen=True)
class BondSpec:
    """Unit zero-recovery investor bond paying at ``maturity`` provided
    the counterparty survives to ``contingency``."""

    maturity: float
    contingency: float = 0.0
    recovery: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.maturity) and self.maturity > 0.0):
            raise ValueError("bond maturity must be positive")
        if not (0.0 <= self.contingency < self.maturity):
            raise ValueError("need 0 <= contingency < maturity")
        _check_recovery(self.recovery, "bond recovery")


def reprice_contingent_bond(
    market: MarketRates,
    model: JointDefaultModel,
    bond: BondSpec,
    *,
    tolerance: float = 1e-8,
    panels: int = QUADRATURE_PANELS,
) -> float:
    """Price the contingent bond two ways and insist they agree.

    External route: ``D(0,T_I) * U(T_I, T_C)``.  Internal route:
    quadrature of the conditional discount against the ``tau_C`` law on
    ``tau_C > T_C``.  A gap beyond ``tolerance`` raises
    :class:`InvariantError`; the external price is returned.
    """
    if bond.recovery != 0.0:
        raise ValueError("contingent repricing requires zero bond recovery")
    external = market.risk_free.discount_factor(0.0, bond.maturity) * model.joint_survival(
        bond.maturity, bond.contingency
    )
    internal = expected_conditional_discount(
        market, model, bond.maturity, contingency=bond.contingency, panels=panels
    )
    gap = abs(internal - external)
    if not (gap <= tolerance):
        raise InvariantError(
            f"contingent bond repricing gap {gap:.3e} exceeds {tolerance:.1e}"
        )
    return external


@dataclass(frozen=True)
class InternalMeasure:
    """A market completion chosen by the investor.

    Two modes are supported.  ``riskfree_cpty`` carries an explicit
    ``(lam_bar_I, r_bar)`` pair tied to the funding-rate constraint; it
    also covers the independent-counterparty case, where the internal
    law of ``tau_C`` is pinned to the market one.  ``correlated`` prices
    dependent defaults with zero bond recovery and ``lam_bar_I = 0``;
    there the deterministic short rate is replaced by the pre-default
    rate implied by the contingent bond.
    """

    mode: str
    market: MarketRates
    recovery_bond: float
    lambda_bar: TermCurve
    rate: TermCurve | None = None
    model: JointDefaultModel | None = None

    def bond_price(self, maturity: float) -> float:
        """Funding-bond price recomputed inside the measure."""
        if not (math.isfinite(maturity) and maturity > 0.0):
            raise ValueError("bond maturity must be positive")
        if self.mode == MODE_RISKFREE_CPTY:
            exponent = self.rate.cumulative(maturity) + (
                1.0 - self.recovery_bond
            ) * self.lambda_bar.cumulative(maturity)
            return math.exp(-exponent)
        # zero recovery: expected contingent discount with no contingency
        return self.market.risk_free.discount_factor(0.0, maturity) * float(
            self.model.investor.survival(maturity)
        )

    def pre_default_rate(self) -> Callable:
        if self.mode != MODE_CORRELATED:
            raise ValueError("pre-default rate is defined for the correlated mode")
        return pre_default_rate(self.market, self.model)

    def counterparty_survival(self, t):
        """Internal survival law of ``tau_C``; always the market one."""
        if self.model is None:
            raise ValueError("no counterparty attached to this measure")
        return self.model.counterparty.survival(t)


def riskfree_counterparty_measure(
    market: MarketRates,
    investor: CreditCurve,
    recovery_bond: float,
    lambda_bar,
) -> InternalMeasure:
    """Measure with explicit internal intensity, counterparty untouched."""
    lam_bar = as_curve(lambda_bar)
    return InternalMeasure(
        mode=MODE_RISKFREE_CPTY,
        market=market,
        recovery_bond=_check_recovery(recovery_bond, "bond recovery"),
        lambda_bar=lam_bar,
        rate=internal_rate(market, investor, recovery_bond, lam_bar),
    )


def correlated_zero_recovery_measure(
    market: MarketRates, model: JointDefaultModel
) -> InternalMeasure:
    """Measure for dependent defaults: zero bond recovery, the investor
    internally default-free, ``tau_C`` kept at its market law."""
    return InternalMeasure(
        mode=MODE_CORRELATED,
        market=market,
        recovery_bond=0.0,
        lambda_bar=TermCurve.flat(0.0),
        model=model,
    )

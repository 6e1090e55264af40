"""Deterministic cashflow streams and default closeout rules.

The trade is a finite stream of known flows ``a_i`` at times ``t_i``
(investor receives positive amounts).  Its collateral-rate value

    v_X(t) = sum_{t_i > t} a_i * exp(-int_t^{t_i} r_X)

discounts every remaining flow at the collateral rate and uses the
ex-dividend convention: a flow paid exactly at ``t`` is no longer part
of the value at ``t``.  Between flow dates ``v_X`` solves
``dv_X/dt = r_X v_X`` (plus the flow itself as a source), and it jumps
down by ``a_i`` across each payment.

On a default at time ``tau`` the surviving party settles against
``v_X(tau)``:

    k_I = v_X+ - rec_I * v_X-     (investor defaults first)
    k_C = rec_C * v_X+ - v_X-     (counterparty defaults first)

where ``x+ = max(x, 0)``, ``x- = max(-x, 0)`` and each recovery lies in
``[0, 1]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .curves import TermCurve

__all__ = [
    "CashflowSchedule",
    "CloseoutSpec",
    "collateral_value",
    "closeout_values",
]


@dataclass(frozen=True)
class CashflowSchedule:
    """Known flows ``amounts[i]`` paid at year fractions ``times[i]``."""

    times: tuple[float, ...]
    amounts: tuple[float, ...]
    maturity: float

    def __post_init__(self):
        times = tuple(float(t) for t in self.times)
        amounts = tuple(float(a) for a in self.amounts)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "amounts", amounts)
        object.__setattr__(self, "maturity", float(self.maturity))
        if not times or len(times) != len(amounts):
            raise ValueError("schedule needs one amount per flow time")
        if any(a >= b for a, b in zip(times, times[1:])):
            raise ValueError("flow times must be strictly increasing")
        if times[0] <= 0.0:
            raise ValueError("flows must be strictly after the valuation date")
        if not math.isfinite(self.maturity) or times[-1] > self.maturity:
            raise ValueError("maturity must be finite and cover every flow")
        if not all(math.isfinite(a) for a in amounts):
            raise ValueError("flow amounts must be finite")

    @classmethod
    def from_flows(cls, flows, maturity: float | None = None) -> "CashflowSchedule":
        """Build from ``(time, amount)`` pairs; maturity defaults to the
        last flow date."""
        pairs = [(float(t), float(a)) for t, a in flows]
        if not pairs:
            raise ValueError("schedule needs at least one flow")
        t_last = max(t for t, _ in pairs)
        return cls(
            tuple(t for t, _ in pairs),
            tuple(a for _, a in pairs),
            t_last if maturity is None else float(maturity),
        )

    def amount_at(self, t: float) -> float:
        """Flow paid exactly at ``t`` (0.0 if none)."""
        try:
            return self.amounts[self.times.index(float(t))]
        except ValueError:
            return 0.0


def collateral_value(schedule: CashflowSchedule, collateral: TermCurve, t):
    """Remaining flows discounted at the collateral rate, ex-dividend.

    Parameters
    ----------
    schedule : CashflowSchedule
    collateral : TermCurve
        The rate ``r_X`` earned on cash posted at the exchange.
    t : float or ndarray
        Valuation times in ``[0, maturity]``.

    Returns
    -------
    float or ndarray shaped like ``t``.
    """
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0.0) or np.any(arr > schedule.maturity):
        raise ValueError("valuation time must lie in [0, maturity]")
    h_t = np.asarray(collateral.cumulative(arr))
    out = np.zeros(arr.shape)
    for t_i, a_i in zip(schedule.times, schedule.amounts):
        h_i = collateral.cumulative(t_i)
        out = out + a_i * np.exp(h_t - h_i) * (arr < t_i)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class CloseoutSpec:
    """Recovered fractions applied to the collateral-rate value on a
    first default."""

    recovery_investor: float
    recovery_counterparty: float

    def __post_init__(self):
        for label, rec in (
            ("recovery_investor", self.recovery_investor),
            ("recovery_counterparty", self.recovery_counterparty),
        ):
            if not (math.isfinite(rec) and 0.0 <= rec <= 1.0):
                raise ValueError(f"{label}: recovery out of range [0, 1]")


def closeout_values(spec: CloseoutSpec, vx):
    """Settlement amounts ``(k_I, k_C)`` against a mark of ``vx``.

    Works elementwise on arrays.  ``k_I >= vx >= k_C`` always: default of
    either party can only hurt the investor's claim.
    """
    vx_arr = np.asarray(vx, dtype=float)
    pos = np.maximum(vx_arr, 0.0)
    neg = np.maximum(-vx_arr, 0.0)
    k_i = pos - spec.recovery_investor * neg
    k_c = spec.recovery_counterparty * pos - neg
    if vx_arr.ndim == 0:
        return float(k_i), float(k_c)
    return k_i, k_c

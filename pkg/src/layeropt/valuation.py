"""Valuation of a reinsurance arrangement: surplus, profit, retained risk, ratio.

The reinsurer's expected surplus for a schedule I is the kernel-weighted
cession mass, integral of K(F(x)) dI(x).  The cedent's expected profit is
gamma * E(X) minus that surplus (minus an optional cost-of-capital charge),
and the decision criterion is profit divided by the retained VaR or CVaR.
Raising the capital coefficient beta shifts the ratio down by exactly beta
for every schedule, so optimal schedules never depend on it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ._integrate import kernel_cost
from .contracts import IndemnitySchedule

VAR = "var"
CVAR = "cvar"


class NonpositiveRiskError(ValueError):
    """Retained risk is not positive, so the profit-over-risk ratio is undefined."""


@dataclass(frozen=True)
class MarketSpec:
    """Primary loading, risk level and risk measure for the cedent's criterion."""

    gamma: float
    epsilon: float
    risk_measure: str = VAR
    beta: float = 0.0

    def __post_init__(self):
        if not (self.gamma > 0.0 and math.isfinite(self.gamma)):
            raise ValueError("gamma must be a positive loading")
        if not (0.0 < self.epsilon < 0.5):
            raise ValueError("epsilon must lie in (0, 0.5)")
        if self.beta < 0.0:
            raise ValueError("beta must be nonnegative")
        measure = str(self.risk_measure).lower()
        if measure not in (VAR, CVAR):
            raise ValueError("risk_measure must be 'var' or 'cvar'")
        object.__setattr__(self, "risk_measure", measure)


@dataclass(frozen=True)
class Valuation:
    surplus: float
    profit: float
    risk: float
    ratio: float


def _segments(schedule: IndemnitySchedule):
    bps = schedule.breakpoints
    for i, slope in enumerate(schedule.slopes):
        hi = bps[i + 1] if i + 1 < len(bps) else math.inf
        yield slope, bps[i], hi


def reinsurer_surplus(model, kernel, schedule: IndemnitySchedule, *, tol: float = 1e-10) -> float:
    """Expected surplus of the reinsurer: integral of K(F(x)) dI(x)."""
    total = 0.0
    for slope, lo, hi in _segments(schedule):
        if slope > 0.0:
            total += slope * kernel_cost(model, kernel, lo, hi, tol=tol)
    return total


def retained_risk(model, schedule: IndemnitySchedule, market: MarketSpec) -> float:
    """VaR or CVaR of the cedent's loss net of the schedule."""
    x_eps = model.var_level(market.epsilon)
    ceded_at_level = float(schedule.evaluate(x_eps))
    if market.risk_measure == VAR:
        risk = x_eps - ceded_at_level
    else:
        excess = 0.0
        for slope, lo, hi in _segments(schedule):
            if slope == 0.0:
                continue
            lo_eff = max(lo, x_eps)
            hi_tail = 0.0 if math.isinf(hi) else float(model.tail_integral(max(hi, x_eps)))
            excess += slope * (float(model.tail_integral(lo_eff)) - hi_tail)
        risk = float(model.tail_expectation(x_eps)) - ceded_at_level - excess / market.epsilon
    if risk <= 0.0:
        raise NonpositiveRiskError(
            f"retained {market.risk_measure} is {risk:.3e}; the ratio criterion is undefined"
        )
    return risk


def expected_profit(model, kernel, schedule: IndemnitySchedule, market: MarketSpec, *, tol: float = 1e-10) -> float:
    """gamma * E(X) - reinsurer surplus - beta * retained risk."""
    value = market.gamma * model.mean - reinsurer_surplus(model, kernel, schedule, tol=tol)
    if market.beta > 0.0:
        value -= market.beta * retained_risk(model, schedule, market)
    return value


def criterion(model, kernel, schedule: IndemnitySchedule, market: MarketSpec, *, tol: float = 1e-10) -> Valuation:
    """Assemble the full valuation; raises NonpositiveRiskError when undefined."""
    risk = retained_risk(model, schedule, market)
    surplus = reinsurer_surplus(model, kernel, schedule, tol=tol)
    profit = market.gamma * model.mean - surplus - market.beta * risk
    return Valuation(surplus=surplus, profit=profit, risk=risk, ratio=profit / risk)

"""Regime diagnostics: when is the best contract a single truncated stop loss?

Four conditions govern the answer for a (model, kernel, market) triple:

* loading: the reinsurance loading is at least the primary loading;
* quantile: the VaR level is at least the mean loss;
* solvency: ceding everything below the VaR level is not profitable
  (otherwise the ratio criterion is unbounded and optimization is moot);
* tail: the base-curve slope at zero times the tail integral beyond the VaR
  level does not exceed the base-curve mass below it.

When all four hold the optimum is a single layer detaching at the VaR level;
when the tail condition fails with both loadings close to their upper
threshold, strictly better multi-layer schedules exist.  This module
evaluates the conditions with signed margins, runs the supporting
attachment-balance analysis, checks the large-portfolio profit limit, and
searches for tail-condition violations usable as multi-layer fixtures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

import numpy as np

from ._integrate import bisect_root, curve_cost, kernel_cost
from .kernels import BaseCurve, PricingKernel, QuadraticCurve
from .losses import Pareto, portfolio_normal_model
from .valuation import VAR, MarketSpec

SINGLE_LAYER = "single-layer"
POSSIBLY_MULTI_LAYER = "possibly-multi-layer"
TRIVIAL_INFINITE_RATIO = "trivial-infinite-ratio"


@dataclass(frozen=True)
class ConditionReport:
    loading_ok: bool
    loading_margin: float
    quantile_ok: bool
    quantile_margin: float
    solvency_ok: bool
    solvency_value: float
    tail_ok: bool
    tail_lhs: float
    tail_rhs: float
    gamma_upper: float
    gamma_lower: float
    predicted_shape: str

    @property
    def all_ok(self) -> bool:
        return self.loading_ok and self.quantile_ok and self.solvency_ok and self.tail_ok


def check_conditions(model, kernel: PricingKernel, market: MarketSpec, *, tol: float = 1e-10) -> ConditionReport:
    """Evaluate all four hypotheses with signed margins and predict the shape."""
    x_eps = model.var_level(market.epsilon)
    tail_lhs = kernel.k0_prime_at_zero * float(model.tail_integral(x_eps))
    tail_rhs = curve_cost(model, kernel.k0, 0.0, x_eps, tol=tol)
    solvency_value = market.gamma * model.mean - kernel_cost(model, kernel, 0.0, x_eps, tol=tol)
    loading_margin = kernel.gamma_r - market.gamma
    quantile_margin = x_eps - model.mean

    loading_ok = loading_margin >= 0.0
    quantile_ok = quantile_margin >= 0.0
    solvency_ok = solvency_value <= 0.0
    tail_ok = tail_lhs <= tail_rhs

    if not solvency_ok:
        shape = TRIVIAL_INFINITE_RATIO
    elif loading_ok and quantile_ok and tail_ok:
        shape = SINGLE_LAYER
    else:
        shape = POSSIBLY_MULTI_LAYER

    return ConditionReport(
        loading_ok=loading_ok,
        loading_margin=loading_margin,
        quantile_ok=quantile_ok,
        quantile_margin=quantile_margin,
        solvency_ok=solvency_ok,
        solvency_value=solvency_value,
        tail_ok=tail_ok,
        tail_lhs=tail_lhs,
        tail_rhs=tail_rhs,
        gamma_upper=kernel.gamma_upper(),
        gamma_lower=kernel.gamma_lower(market.epsilon),
        predicted_shape=shape,
    )


def attachment_balance(a: float, gamma: float, model, base: BaseCurve, market: MarketSpec, *, tol: float = 1e-10) -> float:
    """Weighted cost a*K(F(a)) + integral of K(F) from a to the VaR level.

    The kernel is loaded with gamma_r equal to the primary loading gamma (the
    worst admissible case); the fixed-point attachment of the best stop loss
    is exactly where this quantity equals gamma.
    """
    x_eps = model.var_level(market.epsilon)
    if not (0.0 <= a <= x_eps):
        raise ValueError("attachment must lie between 0 and the VaR level")
    kernel = PricingKernel(base, gamma)
    return a * float(kernel.k(model.cdf(a))) + kernel_cost(model, kernel, a, x_eps, tol=tol)


def gamma_lower_exact(base: BaseCurve, epsilon: float) -> float:
    """Loading whose critical attachment sits exactly at the VaR level.

    ``PricingKernel.gamma_lower`` (the base-curve value at the retained
    quantile) is its small-epsilon approximation; scans over the loading
    interval use this exact endpoint so the closed-form endpoint identities
    hold to machine precision.
    """
    if not (0.0 < epsilon < 1.0):
        raise ValueError("epsilon must lie in (0, 1)")
    u = 1.0 - epsilon
    s = float(base.value(u)) / u
    if s >= 1.0:
        raise ValueError("base curve too steep at the retained quantile")
    return s / (1.0 - s)


def critical_attachment(gamma: float, model, base: BaseCurve, epsilon: float) -> float:
    """The loss level where the loaded kernel falls back to the loading gamma.

    Solves base(u) = gamma/(1+gamma) * u for the positive root and maps it
    through the quantile function.  At the upper loading threshold the root
    is zero; at or below the exact lower endpoint the attachment caps at the
    VaR level, the largest attachment of interest.
    """
    if not (0.0 < epsilon < 1.0):
        raise ValueError("epsilon must lie in (0, 1)")
    g_lo = float(base.value(1.0 - epsilon))
    s0 = base.slope_at_zero
    g_hi = math.inf if s0 >= 1.0 else s0 / (1.0 - s0)
    if gamma < g_lo - 1e-12 or gamma > g_hi + 1e-12:
        raise ValueError(f"gamma={gamma:g} outside the loading interval [{g_lo:g}, {g_hi:g}]")
    slope = gamma / (1.0 + gamma)
    if slope >= s0:
        return 0.0
    u_root = bisect_root(lambda u: float(base.value(u)) - slope * u, 1e-12, 1.0, xtol=1e-15)
    x_eps = model.var_level(epsilon)
    if u_root >= 1.0 - epsilon:
        return x_eps
    return float(model.quantile(u_root))


@dataclass(frozen=True)
class BalanceScanReport:
    gammas: tuple[float, ...]
    attachments: tuple[float, ...]
    balances: tuple[float, ...]
    min_balance_margin: float
    max_concavity_defect: float
    attachments_monotone: bool
    endpoint_low: float
    endpoint_high: float
    upper_capped: bool


def balance_concavity_scan(
    model, base: BaseCurve, market: MarketSpec, n_points: int = 101, *, gamma_cap: float = 10.0
) -> BalanceScanReport:
    """Sample the balance at the critical attachment across the loading interval.

    Verifies the discrete midpoint concavity of gamma -> balance and reports
    the minimum of balance - gamma; in the single-layer regime that minimum
    is nonnegative.  An infinite upper threshold is capped at ``gamma_cap``.
    """
    if n_points < 5:
        raise ValueError("need at least 5 scan points")
    eps = market.epsilon
    g_lo = gamma_lower_exact(base, eps)
    s0 = base.slope_at_zero
    g_hi = math.inf if s0 >= 1.0 else s0 / (1.0 - s0)
    capped = not math.isfinite(g_hi) or g_hi > gamma_cap
    g_hi_eff = min(g_hi, gamma_cap)
    gammas = np.linspace(g_lo, g_hi_eff, n_points)
    attachments = np.array([critical_attachment(g, model, base, eps) for g in gammas])
    balances = np.array([attachment_balance(a, g, model, base, market, tol=1e-12) for a, g in zip(attachments, gammas)])
    margins = balances - gammas
    interior = 0.5 * (balances[:-2] + balances[2:]) - balances[1:-1]
    return BalanceScanReport(
        gammas=tuple(gammas),
        attachments=tuple(attachments),
        balances=tuple(balances),
        min_balance_margin=float(np.min(margins)),
        max_concavity_defect=float(np.max(interior)) if len(interior) else 0.0,
        attachments_monotone=bool(np.all(np.diff(attachments) <= 1e-10)),
        endpoint_low=float(balances[0]),
        endpoint_high=float(balances[-1]),
        upper_capped=capped,
    )


@dataclass(frozen=True)
class AsymptoticRow:
    n: int
    mean: float
    profit_ratio: float
    gap: float
    gap_times_sqrt_n: float


def asymptotic_profit_gaps(n_values, unit_mean: float, unit_sd: float, kernel: PricingKernel, market: MarketSpec):
    """Profit of full cession below the VaR level, per unit of expected loss.

    For growing portfolios of iid risks this ratio approaches the loading
    difference gamma - gamma_r at rate one over the square root of the
    portfolio size; each row reports the remaining gap.
    """
    rows = []
    for n in n_values:
        n = int(n)
        if n < 10:
            raise ValueError("the normal approximation needs n >= 10")
        model = portfolio_normal_model(n, unit_mean, unit_sd)
        x_eps = model.var_level(market.epsilon)
        cost = kernel_cost(model, kernel, 0.0, x_eps, tol=1e-11)
        mean = model.mean
        ratio = (market.gamma * mean - cost) / mean
        gap = abs(ratio - (market.gamma - kernel.gamma_r))
        rows.append(AsymptoticRow(n=n, mean=mean, profit_ratio=ratio, gap=gap, gap_times_sqrt_n=gap * math.sqrt(n)))
    return tuple(rows)


@dataclass(frozen=True)
class ViolationSearchSpec:
    """Family grids searched for tail-condition violations."""

    pareto_shapes: tuple[float, ...] = (1.2, 1.3, 1.4, 1.465, 1.47, 1.5, 2.0)
    kernel_cs: tuple[float, ...] = (0.25, 0.5)
    epsilons: tuple[float, ...] = (0.05,)
    risk_measure: str = VAR
    min_gamma_fraction: float = 0.95
    window_fraction: float = 0.6


@dataclass(frozen=True)
class ViolationInstance:
    model: Pareto
    kernel: PricingKernel
    market: MarketSpec
    report: ConditionReport
    window: tuple[float, float] | None

    @property
    def has_window(self) -> bool:
        return self.window is not None


def find_tail_condition_violation(search: ViolationSearchSpec = ViolationSearchSpec()):
    """Scan the grids for a tail-condition violation near the upper loading.

    Prefers instances where a whole loading window below the solvency
    boundary remains solvent while the single-layer bound already fails;
    placing both loadings inside that window makes the optimum provably
    multi-layer.  If no candidate admits such a window, the first raw
    violation is returned with the loading placed just below its upper
    threshold (possibly in the trivial infinite-ratio regime); returns None
    when the grids are exhausted without any violation.
    """
    fallback = None
    for shape, c, eps in product(search.pareto_shapes, search.kernel_cs, search.epsilons):
        model = Pareto.with_mean(shape, 1.0)
        base = QuadraticCurve(c)
        probe = PricingKernel(base, 0.0)
        x_eps = model.var_level(eps)
        tail_lhs = c * float(model.tail_integral(x_eps))
        tail_rhs = curve_cost(model, probe.k0, 0.0, x_eps, tol=1e-13)
        if tail_lhs <= tail_rhs:
            continue
        g_hi = math.inf if c >= 1.0 else c / (1.0 - c)
        if fallback is None:
            g_fb = 0.975 * g_hi if math.isfinite(g_hi) else 1.0
            kernel_fb = PricingKernel(base, g_fb)
            market_fb = MarketSpec(gamma=g_fb, epsilon=eps, risk_measure=search.risk_measure)
            fallback = ViolationInstance(
                model, kernel_fb, market_fb, check_conditions(model, kernel_fb, market_fb), None
            )
        if not math.isfinite(g_hi):
            continue
        tail_int = float(model.tail_integral(x_eps))
        g_cap = tail_rhs / (tail_int - tail_rhs)  # solvency boundary for gamma_r = gamma
        if not (search.min_gamma_fraction * g_hi <= g_cap < g_hi):
            continue

        def margin(g: float) -> float:
            a = critical_attachment(g, model, base, eps)
            return attachment_balance(a, g, model, base, MarketSpec(g, eps), tol=1e-13) - g

        lo = 0.9 * g_cap
        if margin(lo) <= 0.0 or margin(g_cap) >= 0.0:
            continue
        g_c = bisect_root(margin, lo, g_cap, xtol=1e-15)
        g_star = g_c + search.window_fraction * (g_cap - g_c)
        if g_star < search.min_gamma_fraction * g_hi:
            continue
        kernel = PricingKernel(base, g_star)
        market = MarketSpec(gamma=g_star, epsilon=eps, risk_measure=search.risk_measure)
        report = check_conditions(model, kernel, market, tol=1e-12)
        if report.tail_ok or not report.solvency_ok:
            continue
        return ViolationInstance(model, kernel, market, report, (g_c, g_cap))
    return fallback

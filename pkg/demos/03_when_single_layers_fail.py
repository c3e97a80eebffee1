"""When is a single truncated stop loss NOT the best contract?

Four conditions guarantee single-layer optimality: the reinsurance loading
dominates the primary loading, the VaR level dominates the mean, ceding the
whole band below the VaR level is unprofitable (solvency), and a tail
condition comparing the kernel slope times the tail integral against the
kernel mass below the VaR level.  Heavy Pareto tails can break the tail
condition; pushing both loadings close to the upper threshold then makes a
two-layer contract strictly better.
"""

from layeropt import (
    MarketSpec,
    Pareto,
    best_truncated_stop_loss,
    check_conditions,
    dinkelbach_optimize,
    find_tail_condition_violation,
    quadratic_kernel,
)

# The running example satisfies everything.
from layeropt import Exponential

report = check_conditions(Exponential(1.0), quadratic_kernel(0.5, 0.1), MarketSpec(gamma=0.1, epsilon=0.05))
print("baseline conditions:")
print(f"  loading margin   {report.loading_margin:+.4f}  ok={report.loading_ok}")
print(f"  quantile margin  {report.quantile_margin:+.4f}  ok={report.quantile_ok}")
print(f"  solvency value   {report.solvency_value:+.4f}  ok={report.solvency_ok}")
print(f"  tail sides       {report.tail_lhs:.4f} <= {report.tail_rhs:.4f}  ok={report.tail_ok}")
print(f"  predicted shape: {report.predicted_shape}")
print()

# A moderately heavy Pareto tail violates the tail condition outright.
heavy = Pareto.with_mean(1.3, 1.0)
report = check_conditions(heavy, quadratic_kernel(0.5, 0.1), MarketSpec(gamma=0.1, epsilon=0.05))
print(f"pareto shape 1.3: tail sides {report.tail_lhs:.4f} vs {report.tail_rhs:.4f}, ok={report.tail_ok}")
print()

# The search scans shape/slope/level grids for a violation that stays
# solvent while both loadings sit within 5% of the upper threshold; in that
# window the optimum provably needs more than one layer.
inst = find_tail_condition_violation()
print("windowed violation instance:")
print(f"  model: pareto shape {inst.model.shape}, scale {inst.model.scale:.6f}")
print(f"  kernel c = {inst.kernel.base.c}, loadings gamma = gamma_r = {inst.market.gamma:.9f}")
print(f"  loading window below solvency boundary: {inst.window}")
print(f"  gamma / gamma_upper = {inst.market.gamma / inst.report.gamma_upper:.4f}")

dink = dinkelbach_optimize(inst.model, inst.kernel, inst.market)
tsl = best_truncated_stop_loss(inst.model, inst.kernel, inst.market)
print(f"  best single layer ratio: {tsl.valuation.ratio:.9f}")
print(f"  unrestricted optimum:    {dink.valuation.ratio:.9f} ({dink.classification})")
for layer in dink.schedule.layers():
    print(f"    layer ({layer.attachment:.6f}, {layer.detachment:.6f})")
print(f"  improvement: {dink.valuation.ratio - tsl.valuation.ratio:.3e}")

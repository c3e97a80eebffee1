"""Scale invariance and the large-portfolio profit limit.

Two structural facts make the engine's answers portable across portfolio
sizes.  First, jointly rescaling the loss distribution and the contract
leaves the profit-over-risk ratio unchanged, so everything can be studied at
mean one.  Second, for a growing pool of iid risks, the profit of ceding the
whole band below the VaR level approaches gamma - gamma_r per unit of
expected loss, at the square-root rate: if reinsurance were cheaper than the
primary loading, large cedents could lock in profit with almost no retained
reserve.
"""

from layeropt import (
    Exponential,
    MarketSpec,
    asymptotic_profit_gaps,
    criterion,
    quadratic_kernel,
    truncated_stop_loss,
)

kernel = quadratic_kernel(c=0.5, gamma_r=0.1)
market = MarketSpec(gamma=0.1, epsilon=0.05)

# --- scale invariance ------------------------------------------------------
small = Exponential(1.0)
layer = truncated_stop_loss(1.0, small.var_level(0.05))
base = criterion(small, kernel, layer, market)
print("scale invariance of the ratio:")
print(f"  mean 1   : ratio {base.ratio:.10f}")
for scale in (0.5, 3.0, 10.0):
    value = criterion(small.rescale(scale), kernel, layer.rescale(scale), market)
    print(f"  mean {scale:4g}: ratio {value.ratio:.10f}")
print()

# --- large portfolios ------------------------------------------------------
# Equal loadings: the limit is zero, and the remaining gap shrinks like
# 1/sqrt(n) (the scaled column is flat).
print("profit of the full lower band per unit mean, equal loadings:")
print(f"{'n':>8s} {'profit ratio':>14s} {'gap':>10s} {'gap*sqrt(n)':>12s}")
for row in asymptotic_profit_gaps((100, 1000, 10_000), 1.0, 1.0, kernel, market):
    print(f"{row.n:8d} {row.profit_ratio:14.6f} {row.gap:10.6f} {row.gap_times_sqrt_n:12.4f}")
print()

# Cheaper reinsurance than the primary market (gamma_r < gamma) would leave a
# positive limit: profit with near-zero reserve for a large cedent.
cheap = quadratic_kernel(c=0.5, gamma_r=0.05)
print("same, with gamma_r = 0.05 < gamma = 0.1 (limit 0.05):")
for row in asymptotic_profit_gaps((100, 1000, 10_000), 1.0, 1.0, cheap, market):
    print(f"{row.n:8d} {row.profit_ratio:14.6f}")

"""Pricing reinsurance layers under a concave kernel.

A reinsurer quotes cover through a pricing kernel K: the expected surplus it
earns on a contract I is the integral of K(F(x)) dI(x), where F is the loss
cdf.  K(0) is the flat loading charged even for certain payouts; K falls to
zero at the top of the distribution.  This script builds the running example
used throughout the package: exponential losses with mean 1, the quadratic
base curve with c = 0.5, and loadings gamma = gamma_r = 0.1 at risk level
epsilon = 0.05.
"""

from layeropt import (
    Exponential,
    MarketSpec,
    criterion,
    quadratic_kernel,
    reinsurer_surplus,
    truncated_stop_loss,
    zero_schedule,
)

model = Exponential(1.0)
kernel = quadratic_kernel(c=0.5, gamma_r=0.1)
market = MarketSpec(gamma=0.1, epsilon=0.05)

x_eps = model.var_level(market.epsilon)
print(f"loss model: exponential, mean {model.mean}")
print(f"VaR level at epsilon={market.epsilon}: x_eps = {x_eps:.6f}")
print(f"kernel at the origin (flat loading): {kernel.k(0.0):.3f}")
print(f"kernel at the VaR level: {kernel.k(model.cdf(x_eps)):.6f}")
print()

# Price three contracts: nothing, the band from 0 up to the VaR level, and
# everything.  Full cession of the lower band is loss-making for the cedent
# whenever the solvency condition holds.
for label, schedule in [
    ("no cession", zero_schedule()),
    ("band [0, x_eps]", truncated_stop_loss(0.0, x_eps)),
    ("full cession", truncated_stop_loss(0.0)),
]:
    cost = reinsurer_surplus(model, kernel, schedule)
    print(f"{label:16s} reinsurer surplus = {cost:.7f}")
print()

# The decision criterion is expected profit over retained risk, for VaR or
# CVaR.  A mid-band layer keeps some profit while capping the retained loss.
layer = truncated_stop_loss(1.0, x_eps)
for measure in ("var", "cvar"):
    m = MarketSpec(gamma=0.1, epsilon=0.05, risk_measure=measure)
    value = criterion(model, kernel, layer, m)
    print(
        f"{measure:4s}: layer (1, x_eps) -> profit {value.profit:+.6f}, "
        f"risk {value.risk:.6f}, ratio {value.ratio:.6f}"
    )

"""Shared fixtures: randomized instances satisfying the single-layer hypotheses."""

import numpy as np
import pytest

from layeropt import (
    DistortionCurve,
    Exponential,
    Gamma,
    Lognormal,
    MarketSpec,
    PowerDistortion,
    PricingKernel,
    QuadraticCurve,
    check_conditions,
)


def make_hypothesis_instances(count=50, seed=20240901):
    """Rejection-sample (model, kernel, market) triples passing all four checks."""
    rng = np.random.default_rng(seed)
    out = []
    attempts = 0
    while len(out) < count and attempts < 1000:
        attempts += 1
        fam = len(out) % 3
        if fam == 0:
            model = Exponential(1.0)
        elif fam == 1:
            model = Lognormal.from_mean(1.0, float(rng.uniform(0.4, 1.0)))
        else:
            model = Gamma.from_mean(1.0, float(rng.uniform(0.6, 3.0)))
        if len(out) % 2 == 0:
            base = QuadraticCurve(float(rng.uniform(0.15, 1.0)))
        else:
            base = DistortionCurve(PowerDistortion(float(rng.uniform(0.45, 0.95))))
        gamma_r = float(rng.uniform(0.06, 0.45))
        gamma = gamma_r * float(rng.uniform(0.3, 1.0))
        eps = float(rng.uniform(0.02, 0.2))
        kernel = PricingKernel(base, gamma_r)
        market = MarketSpec(gamma=gamma, epsilon=eps)
        if check_conditions(model, kernel, market).all_ok:
            out.append((model, kernel, market))
    assert len(out) == count, "rejection sampling failed to fill the instance set"
    return out


@pytest.fixture(scope="session")
def hypothesis_instances():
    return make_hypothesis_instances()

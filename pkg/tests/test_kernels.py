"""Tests for pricing kernels and distortions."""

import math

import numpy as np
import pytest

from layeropt import (
    CappedLinearDistortion,
    DistortionCurve,
    PowerDistortion,
    PricingKernel,
    QuadraticCurve,
    from_distortion,
    quadratic_kernel,
)

BASELINE = quadratic_kernel(0.5, 0.1)


class TestBaseCurve:
    def test_quadratic_values(self):
        assert BASELINE.k0(0.0) == 0.0
        assert BASELINE.k0(0.5) == pytest.approx(0.125, abs=1e-15)
        assert BASELINE.k0(1.0) == 0.0

    def test_power_distortion_curve(self):
        k = from_distortion(PowerDistortion(0.5), 0.0)
        assert k.k0(0.75) == pytest.approx(0.25, abs=1e-15)
        assert k.k0_prime_at_zero == pytest.approx(0.5)

    def test_quadratic_c_bounds(self):
        with pytest.raises(ValueError, match=r"\(0, 1\]"):
            QuadraticCurve(1.2)
        with pytest.raises(ValueError):
            QuadraticCurve(0.0)


class TestLoadedKernel:
    def test_endpoints(self):
        assert BASELINE.k(0.0) == pytest.approx(0.1, abs=1e-15)
        assert BASELINE.k(1.0) == pytest.approx(0.0, abs=1e-15)

    def test_interior_value(self):
        assert BASELINE.k(0.5) == pytest.approx(0.1875, abs=1e-15)

    def test_domain(self):
        with pytest.raises(ValueError):
            BASELINE.k(-0.01)
        with pytest.raises(ValueError):
            BASELINE.k0(1.01)

    def test_concavity_on_grid(self):
        u = np.linspace(0.0, 1.0, 200)
        for kernel in (BASELINE, from_distortion(PowerDistortion(0.6), 0.2)):
            v = np.asarray(kernel.k(u))
            mid = np.asarray(kernel.k(0.5 * (u[:-1] + u[1:])))
            assert np.all(mid >= 0.5 * (v[:-1] + v[1:]) - 1e-10)
            assert np.all(v >= -1e-15)

    def test_loading_monotonicity(self):
        u = np.linspace(0.0, 1.0, 50)
        prev = np.asarray(quadratic_kernel(0.5, 0.0).k(u))
        for gr in (0.05, 0.1, 0.3, 0.8):
            cur = np.asarray(quadratic_kernel(0.5, gr).k(u))
            assert np.all(cur >= prev - 1e-15)
            prev = cur

    def test_k_max_finds_concave_peak(self):
        # location is sqrt(eps)-accurate near a quadratic peak; the value is exact
        u_star, k_star = BASELINE.k_max()
        assert u_star == pytest.approx(0.45 / 1.1, abs=1e-6)
        assert k_star == pytest.approx(0.1 + 0.45**2 / (4 * 0.55), abs=1e-12)


class TestFromDistortion:
    def test_identity_is_risk_neutral(self):
        k = from_distortion(PowerDistortion(1.0), 0.1)
        u = np.linspace(0.0, 1.0, 11)
        np.testing.assert_allclose(np.asarray(k.k0(u)), 0.0, atol=1e-15)
        np.testing.assert_allclose(np.asarray(k.k(u)), 0.1 * (1.0 - u), atol=1e-15)

    def test_convex_distortion_rejected(self):
        with pytest.raises(ValueError, match="dominate the identity"):
            from_distortion(PowerDistortion(2.0), 0.1)

    def test_capped_linear_accepted_at_slope_boundary(self):
        k = from_distortion(CappedLinearDistortion(2.0), 0.1)
        assert k.k0_prime_at_zero == pytest.approx(1.0)
        assert k.gamma_upper() == math.inf

    def test_distortion_identity_recovered(self):
        # k0(u) + (1 - u) reproduces the distortion at the survival level
        g = PowerDistortion(0.7)
        k = from_distortion(g, 0.0)
        u = np.linspace(0.0, 1.0, 21)
        np.testing.assert_allclose(
            np.asarray(k.k0(u)) + (1.0 - u), np.asarray(g.value(1.0 - u)), atol=1e-15
        )


class TestThresholds:
    def test_gamma_upper_quadratic(self):
        assert quadratic_kernel(0.5, 0.1).gamma_upper() == pytest.approx(1.0)
        assert quadratic_kernel(0.25, 0.1).gamma_upper() == pytest.approx(1.0 / 3.0)

    def test_gamma_upper_infinite_at_unit_slope(self):
        assert quadratic_kernel(1.0, 0.1).gamma_upper() == math.inf

    def test_gamma_lower(self):
        assert BASELINE.gamma_lower(0.05) == pytest.approx(0.02375, abs=1e-15)
        assert quadratic_kernel(1.0, 0.0).gamma_lower(0.5) == pytest.approx(0.25, abs=1e-15)
        assert BASELINE.gamma_lower(1.0 - 1e-12) == pytest.approx(0.0, abs=1e-11)

    def test_with_loading(self):
        raised = BASELINE.with_loading(0.3)
        assert raised.gamma_r == 0.3
        assert raised.k(0.0) == pytest.approx(0.3)
        assert raised.base is BASELINE.base


def test_kernel_validation_rejects_negative_loading():
    with pytest.raises(ValueError):
        PricingKernel(QuadraticCurve(0.5), -0.1)


def test_distortion_curve_family_label():
    assert DistortionCurve(PowerDistortion(0.5)).family == "distortion"

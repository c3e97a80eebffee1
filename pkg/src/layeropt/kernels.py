"""Pricing kernels: the normalized concave curve and its loaded version.

A reinsurer's expected surplus per unit of cover at probability level u is
K(u) = (1 + gamma_r) * K0(u) + gamma_r * (1 - u), where K0 is a normalized
concave curve with K0(0) = K0(1) = 0 and gamma_r = K(0) is the flat loading.
K0 either comes from the quadratic family c*(u - u^2) or is induced by a
concave distortion g via K0(u) = g(1 - u) - (1 - u).
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

_CONCAVITY_GRID = np.linspace(0.0, 1.0, 201)


def _validate_unit(u):
    arr = np.asarray(u, dtype=float)
    if np.any((arr < 0.0) | (arr > 1.0)):
        raise ValueError("probability level must lie in [0, 1]")
    return arr


def _ret(arr):
    arr = np.asarray(arr)
    return float(arr) if arr.ndim == 0 else arr


class Distortion(ABC):
    """Concave distortion g on [0, 1] with g(0) = 0, g(1) = 1, g(s) >= s."""

    @abstractmethod
    def value(self, s): ...

    @abstractmethod
    def slope_at_one(self) -> float:
        """Left derivative of g at s = 1; fixes the induced curve's slope at zero."""


@dataclass(frozen=True)
class PowerDistortion(Distortion):
    """g(s) = s**exponent (proportional hazard when exponent < 1)."""

    exponent: float

    def __post_init__(self):
        if not (self.exponent > 0.0 and math.isfinite(self.exponent)):
            raise ValueError("exponent must be positive and finite")

    def value(self, s):
        return _ret(np.asarray(s, dtype=float) ** self.exponent)

    def slope_at_one(self) -> float:
        return self.exponent


@dataclass(frozen=True)
class CappedLinearDistortion(Distortion):
    """g(s) = min(slope * s, 1), slope >= 1."""

    slope: float

    def __post_init__(self):
        if not (self.slope >= 1.0 and math.isfinite(self.slope)):
            raise ValueError("slope must be at least 1")

    def value(self, s):
        return _ret(np.minimum(self.slope * np.asarray(s, dtype=float), 1.0))

    def slope_at_one(self) -> float:
        return 1.0 if self.slope == 1.0 else 0.0


class BaseCurve(ABC):
    """Normalized kernel K0."""

    family: str = "abstract"

    @abstractmethod
    def value(self, u): ...

    @property
    @abstractmethod
    def slope_at_zero(self) -> float: ...


@dataclass(frozen=True)
class QuadraticCurve(BaseCurve):
    """K0(u) = c * (u - u^2) with 0 < c <= 1."""

    c: float
    family = "quadratic"

    def __post_init__(self):
        if not (0.0 < self.c <= 1.0):
            raise ValueError("c must lie in (0, 1]")

    def value(self, u):
        u = np.asarray(u, dtype=float)
        return _ret(self.c * (u - u * u))

    @property
    def slope_at_zero(self) -> float:
        return self.c


@dataclass(frozen=True)
class DistortionCurve(BaseCurve):
    """K0(u) = g(1 - u) - (1 - u) for a concave distortion g."""

    distortion: Distortion
    family = "distortion"

    def value(self, u):
        s = 1.0 - np.asarray(u, dtype=float)
        return _ret(np.asarray(self.distortion.value(s)) - s)

    @property
    def slope_at_zero(self) -> float:
        return 1.0 - self.distortion.slope_at_one()


@dataclass(frozen=True)
class PricingKernel:
    """Loaded kernel K(u) = (1 + gamma_r) K0(u) + gamma_r (1 - u)."""

    base: BaseCurve
    gamma_r: float

    def __post_init__(self):
        if not (self.gamma_r >= 0.0 and math.isfinite(self.gamma_r)):
            raise ValueError("gamma_r must be a finite nonnegative loading")
        k0 = np.asarray(self.base.value(_CONCAVITY_GRID))
        if abs(k0[0]) > 1e-12 or abs(k0[-1]) > 1e-12:
            raise ValueError("base curve must vanish at 0 and 1")
        mid = np.asarray(self.base.value(0.5 * (_CONCAVITY_GRID[:-1] + _CONCAVITY_GRID[1:])))
        if np.any(mid < 0.5 * (k0[:-1] + k0[1:]) - 1e-10):
            raise ValueError("base curve fails the concavity midpoint test")
        s0 = self.base.slope_at_zero
        if not (0.0 <= s0 <= 1.0 + 1e-12):
            raise ValueError("base curve slope at zero must lie in [0, 1]")

    @property
    def k0_prime_at_zero(self) -> float:
        return self.base.slope_at_zero

    def k0(self, u):
        """Normalized kernel at level u."""
        return _ret(self.base.value(_validate_unit(u)))

    def k(self, u):
        """Loaded kernel; k(0) = gamma_r and k(1) = 0."""
        u = _validate_unit(u)
        return _ret((1.0 + self.gamma_r) * np.asarray(self.base.value(u)) + self.gamma_r * (1.0 - u))

    def with_loading(self, gamma_r: float) -> "PricingKernel":
        return PricingKernel(self.base, gamma_r)

    def gamma_upper(self) -> float:
        """Largest loading for which the loaded kernel still rises at the origin.

        Infinite when the base slope at zero is exactly one.
        """
        s0 = self.k0_prime_at_zero
        if s0 >= 1.0:
            return math.inf
        return s0 / (1.0 - s0)

    def gamma_lower(self, epsilon: float) -> float:
        """Base-curve value at the retained quantile level, K0(1 - epsilon)."""
        if not (0.0 < epsilon < 1.0):
            raise ValueError("epsilon must lie in (0, 1)")
        return float(self.base.value(1.0 - epsilon))

    def k_max(self) -> tuple[float, float]:
        """(argmax, max) of the loaded kernel on [0, 1]."""
        grid = np.linspace(0.0, 1.0, 2049)
        vals = np.asarray(self.k(grid))
        i = int(np.argmax(vals))
        lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
        # golden-section refinement; concavity makes this safe
        inv = (math.sqrt(5.0) - 1.0) / 2.0
        a, b = lo, hi
        x1 = b - inv * (b - a)
        x2 = a + inv * (b - a)
        f1, f2 = self.k(x1), self.k(x2)
        for _ in range(80):
            if f1 < f2:
                a, x1, f1 = x1, x2, f2
                x2 = a + inv * (b - a)
                f2 = self.k(x2)
            else:
                b, x2, f2 = x2, x1, f1
                x1 = b - inv * (b - a)
                f1 = self.k(x1)
        u_star = 0.5 * (a + b)
        return u_star, float(self.k(u_star))


def quadratic_kernel(c: float, gamma_r: float) -> PricingKernel:
    return PricingKernel(QuadraticCurve(c), gamma_r)


def from_distortion(distortion: Distortion, gamma_r: float) -> PricingKernel:
    """Build a kernel from a concave distortion, validating the distortion itself."""
    s = np.linspace(0.0, 1.0, 201)
    g = np.asarray(distortion.value(s))
    if abs(g[0]) > 1e-12 or abs(g[-1] - 1.0) > 1e-12:
        raise ValueError("distortion must satisfy g(0) = 0 and g(1) = 1")
    if np.any(g < s - 1e-12):
        raise ValueError("distortion must dominate the identity, g(s) >= s")
    mid = np.asarray(distortion.value(0.5 * (s[:-1] + s[1:])))
    if np.any(mid < 0.5 * (g[:-1] + g[1:]) - 1e-10):
        raise ValueError("distortion fails the concavity midpoint test")
    return PricingKernel(DistortionCurve(distortion), gamma_r)

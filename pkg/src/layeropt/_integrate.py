"""Quadrature helpers shared by valuation, optimization and condition checks."""

from __future__ import annotations

import math
import warnings

import numpy as np
from scipy.integrate import IntegrationWarning, quad

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(24)


def curve_cost(model, curve, a: float, b: float, *, tol: float = 1e-10) -> float:
    """Integral of curve(F(x)) over [a, b]; ``b`` may be infinite.

    The cdf's non-smooth points are passed to the integrator as split points.
    An infinite upper limit is integrated over survival-probability octaves
    (quantile slices halving the tail mass), which handles slowly decaying
    tails without relying on a single transform; divergence is detected when
    the octave contributions stop shrinking.
    """
    if b <= a:
        return 0.0

    def integrand(x):
        return curve(model.cdf(x))

    if math.isinf(b):
        cut = max([a] + list(model.cdf_knots))
        total = curve_cost(model, curve, a, cut, tol=tol) if cut > a else 0.0
        survival = 1.0 - float(model.cdf(cut))
        prev = math.inf
        for _ in range(80):
            if survival <= 1e-18:
                break
            nxt = float(model.quantile(1.0 - survival / 2.0))
            with warnings.catch_warnings():
                # octave convergence is monitored below, piece-level roundoff is fine
                warnings.simplefilter("ignore", IntegrationWarning)
                piece, _ = quad(integrand, cut, nxt, epsabs=tol, limit=100)
            total += piece
            if piece <= tol:
                # bound the rest by the geometric continuation of the octaves
                if prev > piece > 0.0:
                    ratio = piece / prev
                    if ratio < 0.999:
                        total += piece * ratio / (1.0 - ratio)
                break
            if piece >= prev:
                raise ValueError("kernel cost integral does not converge on the tail")
            prev = piece
            cut = nxt
            survival /= 2.0
        return total
    knots = [t for t in model.cdf_knots if a < t < b]
    value, _ = quad(integrand, a, b, epsabs=tol, limit=200, points=knots or None)
    return value


def kernel_cost(model, kernel, a: float, b: float, *, tol: float = 1e-10) -> float:
    """Integral of the loaded kernel K(F(x)) over [a, b]."""
    return curve_cost(model, kernel.k, a, b, tol=tol)


def cumulative_kernel_cost(model, kernel, grid) -> np.ndarray:
    """Cumulative integral of K(F(x)) along a sorted grid (knots must be in it).

    Uses fixed 24-node Gauss-Legendre panels between consecutive grid points:
    exact to machine precision for the smooth integrands that arise here, and
    fully vectorized so big contract sweeps stay cheap.
    """
    grid = np.asarray(grid, dtype=float)
    widths = np.diff(grid)
    mids = 0.5 * (grid[:-1] + grid[1:])
    xs = mids[:, None] + 0.5 * widths[:, None] * _GL_NODES[None, :]
    vals = kernel.k(model.cdf(xs.ravel())).reshape(xs.shape)
    panel = 0.5 * widths * (vals @ _GL_WEIGHTS)
    return np.concatenate([[0.0], np.cumsum(panel)])


def bisect_root(func, lo: float, hi: float, *, xtol: float = 1e-12, max_iter: int = 200) -> float:
    """Plain bisection for a bracketed sign change; returns the midpoint."""
    flo = func(lo)
    fhi = func(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:
        raise ValueError("root is not bracketed")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fmid = func(mid)
        if fmid == 0.0 or hi - lo < xtol:
            return mid
        if flo * fmid < 0.0:
            hi = mid
        else:
            lo, flo = mid, fmid
    return 0.5 * (lo + hi)

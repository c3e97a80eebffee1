"""Piecewise-linear indemnity schedules.

A schedule is stored as breakpoints 0 = x0 < x1 < ... < xm with one slope per
segment (the last segment runs to infinity).  Slopes live in [0, 1], which
together with I(0) = 0 makes every schedule nondecreasing, 1-Lipschitz and
pointwise between 0 and x.  Construction canonicalizes by merging adjacent
segments of equal slope, so equality of canonical forms is equality of the
underlying functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_SLOPE_TOL = 1e-12


@dataclass(frozen=True)
class Layer:
    """A full-cession interval; detachment may be infinite."""

    attachment: float
    detachment: float

    def __post_init__(self):
        if not (0.0 <= self.attachment < self.detachment):
            raise ValueError("layer needs 0 <= attachment < detachment")

    @property
    def width(self) -> float:
        return self.detachment - self.attachment


@dataclass(frozen=True)
class IndemnitySchedule:
    breakpoints: tuple[float, ...]
    slopes: tuple[float, ...]

    def __post_init__(self):
        bps = tuple(float(b) for b in self.breakpoints)
        slopes = tuple(float(s) for s in self.slopes)
        if len(bps) != len(slopes) or not bps:
            raise ValueError("need one slope per breakpoint")
        if bps[0] != 0.0:
            raise ValueError("first breakpoint must be 0")
        if any(b <= a for a, b in zip(bps, bps[1:])) or not math.isfinite(bps[-1]):
            raise ValueError("breakpoints must be finite and strictly increasing")
        if any(s < -_SLOPE_TOL or s > 1.0 + _SLOPE_TOL for s in slopes):
            raise ValueError("slopes must lie in [0, 1]")
        slopes = tuple(min(max(s, 0.0), 1.0) for s in slopes)
        # canonical form: merge runs of equal slope
        merged_b, merged_s = [bps[0]], [slopes[0]]
        for b, s in zip(bps[1:], slopes[1:]):
            if s == merged_s[-1]:
                continue
            merged_b.append(b)
            merged_s.append(s)
        object.__setattr__(self, "breakpoints", tuple(merged_b))
        object.__setattr__(self, "slopes", tuple(merged_s))
        knots = np.asarray(self.breakpoints)
        values = np.concatenate([[0.0], np.cumsum(np.asarray(self.slopes[:-1]) * np.diff(knots))])
        object.__setattr__(self, "_knots", knots)
        object.__setattr__(self, "_values", values)

    def evaluate(self, x):
        """I(x), vectorized; negative arguments evaluate as zero loss."""
        x = np.maximum(np.asarray(x, dtype=float), 0.0)
        idx = np.clip(np.searchsorted(self._knots, x, side="right") - 1, 0, len(self._knots) - 1)
        out = self._values[idx] + np.asarray(self.slopes)[idx] * (x - self._knots[idx])
        return float(out) if out.ndim == 0 else out

    def layers(self) -> list[Layer]:
        """Full-cession intervals of a bang-bang schedule, in increasing order."""
        if any(s not in (0.0, 1.0) for s in self.slopes):
            raise ValueError("schedule is not bang-bang: fractional slope present")
        out = []
        for i, s in enumerate(self.slopes):
            if s == 1.0:
                hi = self.breakpoints[i + 1] if i + 1 < len(self.breakpoints) else math.inf
                out.append(Layer(self.breakpoints[i], hi))
        return out

    def rescale(self, factor: float) -> "IndemnitySchedule":
        """Stretch the loss axis by ``factor`` (slopes are unchanged)."""
        if not (factor > 0.0 and math.isfinite(factor)):
            raise ValueError("factor must be positive and finite")
        return IndemnitySchedule(tuple(b * factor for b in self.breakpoints), self.slopes)

    @property
    def is_zero(self) -> bool:
        return all(s == 0.0 for s in self.slopes)

    def describe(self) -> str:
        segs = []
        for i, s in enumerate(self.slopes):
            hi = self.breakpoints[i + 1] if i + 1 < len(self.breakpoints) else math.inf
            segs.append(f"[{self.breakpoints[i]:g}, {hi:g}) slope {s:g}")
        return "; ".join(segs)


def zero_schedule() -> IndemnitySchedule:
    return IndemnitySchedule((0.0,), (0.0,))


def full_cession() -> IndemnitySchedule:
    return IndemnitySchedule((0.0,), (1.0,))


def truncated_stop_loss(attachment: float, detachment: float = math.inf) -> IndemnitySchedule:
    """The layer contract paying (x - attachment)+ capped at the layer width."""
    if not (0.0 <= attachment < detachment):
        raise ValueError("need 0 <= attachment < detachment")
    bps: list[float] = [0.0]
    slopes: list[float] = []
    if attachment > 0.0:
        slopes.append(0.0)
        bps.append(attachment)
    slopes.append(1.0)
    if math.isfinite(detachment):
        bps.append(detachment)
        slopes.append(0.0)
    return IndemnitySchedule(tuple(bps), tuple(slopes))


def schedule_from_layers(layers) -> IndemnitySchedule:
    """Bang-bang schedule covering exactly the given disjoint layers."""
    items = sorted(layers, key=lambda l: l.attachment)
    if not items:
        return zero_schedule()
    for lo, hi in zip(items, items[1:]):
        if hi.attachment < lo.detachment:
            raise ValueError("layers overlap")
    if any(not math.isfinite(l.detachment) for l in items[:-1]):
        raise ValueError("only the last layer may be unbounded")
    bps: list[float] = [0.0]
    slopes: list[float] = []
    cursor = 0.0
    for layer in items:
        if layer.attachment > cursor:
            slopes.append(0.0)
            bps.append(layer.attachment)
        slopes.append(1.0)
        if math.isfinite(layer.detachment):
            bps.append(layer.detachment)
            cursor = layer.detachment
        else:
            cursor = math.inf
    if math.isfinite(cursor):
        slopes.append(0.0)
    return IndemnitySchedule(tuple(bps), tuple(slopes))

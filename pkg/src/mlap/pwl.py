"""Nondecreasing piecewise-linear functions of time.

A MonotonePwl is a list of knots (xs, ys) plus a tail slope: the function
is constant at ys[0] before the first knot, linear between knots, and has
slope `tail` after the last knot. All growth curves in the package
(waiting costs, surplus envelopes, optimum-vs-time curves) live in this
class, so crossings like "earliest t with f(t) >= target" are computed by
segment scan instead of bisection on opaque callables.

Everything is plain float arithmetic on knot coordinates; results are
exact up to rounding of the individual interpolations.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass

from .errors import BadParams

# Tolerated downward float noise when summing knot values of functions
# that are each nondecreasing.
_MONO_SLACK = 1e-9


@dataclass(frozen=True)
class MonotonePwl:
    xs: tuple  # knot times, strictly ascending, at least one
    ys: tuple  # knot values, nondecreasing
    tail: float = 0.0  # slope after the last knot

    def __post_init__(self):
        if not self.xs or len(self.xs) != len(self.ys):
            raise BadParams("knot arrays empty or mismatched")
        for a, b in zip(self.xs, self.xs[1:]):
            if not b > a:
                raise BadParams(f"knot times not strictly ascending: {a} -> {b}")
        for a, b in zip(self.ys, self.ys[1:]):
            if b < a - _MONO_SLACK * (abs(a) + 1.0):
                raise BadParams(f"knot values decrease: {a} -> {b}")
        if self.tail < 0:
            raise BadParams("negative tail slope")

    @staticmethod
    def constant(value: float = 0.0) -> "MonotonePwl":
        return MonotonePwl((0.0,), (float(value),), 0.0)

    def value(self, t: float) -> float:
        xs, ys = self.xs, self.ys
        i = bisect.bisect_left(xs, t)
        if i < len(xs) and xs[i] == t:
            return ys[i]
        if i == 0:
            return ys[0]
        if i == len(xs):
            return ys[-1] + self.tail * (t - xs[-1])
        x0, x1, y0, y1 = xs[i - 1], xs[i], ys[i - 1], ys[i]
        return y0 + (y1 - y0) * (t - x0) / (x1 - x0)

    def __add__(self, other: "MonotonePwl") -> "MonotonePwl":
        if not isinstance(other, MonotonePwl):
            return NotImplemented
        xs = sorted(set(self.xs) | set(other.xs))
        ys = [self.value(x) + other.value(x) for x in xs]
        return MonotonePwl(tuple(xs), _clamp_monotone(ys), self.tail + other.tail)

    @staticmethod
    def sum_of(fns) -> "MonotonePwl":
        fns = list(fns)
        if not fns:
            return MonotonePwl.constant(0.0)
        xs = sorted({x for f in fns for x in f.xs})
        ys = [sum(f.value(x) for f in fns) for x in xs]
        tail = sum(f.tail for f in fns)
        return MonotonePwl(tuple(xs), _clamp_monotone(ys), tail)

    def scale(self, k: float) -> "MonotonePwl":
        if k < 0:
            raise BadParams("scale factor must be >= 0")
        return MonotonePwl(self.xs, tuple(y * k for y in self.ys), self.tail * k)

    def hinge(self, c: float) -> "MonotonePwl":
        """max(0, f - c), with the zero-crossing inserted as a knot."""
        xs, ys = self.xs, self.ys
        if ys[0] >= c:
            return MonotonePwl(xs, tuple(y - c for y in ys), self.tail)
        i = _first_at_least(ys, c)
        if i is None:
            if self.tail > 0:
                cross = xs[-1] + (c - ys[-1]) / self.tail
                return MonotonePwl((cross,), (0.0,), self.tail)
            return MonotonePwl((xs[-1],), (0.0,), 0.0)
        # ys[i-1] < c <= ys[i], so the segment has positive slope
        cross = xs[i - 1] + (c - ys[i - 1]) * (xs[i] - xs[i - 1]) / (ys[i] - ys[i - 1])
        rest_x = xs[i:]
        rest_y = tuple(y - c for y in ys[i:])
        if cross < rest_x[0]:
            return MonotonePwl((cross,) + rest_x, (0.0,) + rest_y, self.tail)
        return MonotonePwl(rest_x, _clamp_monotone(list(rest_y)), self.tail)

    def first_reach(self, target: float):
        """Earliest t >= 0 with value(t) >= target, or None if never."""
        xs, ys = self.xs, self.ys
        if ys[0] >= target:
            return 0.0
        i = _first_at_least(ys, target)
        if i is None:
            if self.tail > 0:
                return max(0.0, xs[-1] + (target - ys[-1]) / self.tail)
            return None
        cross = xs[i - 1] + (target - ys[i - 1]) * (xs[i] - xs[i - 1]) / (ys[i] - ys[i - 1])
        return max(0.0, min(cross, xs[i]))

    def minus_clamped(self, other: "MonotonePwl") -> "MonotonePwl":
        """self - other, clamping float noise below zero (caller asserts
        the true difference is nonnegative and nondecreasing)."""
        xs = sorted(set(self.xs) | set(other.xs))
        ys = [max(0.0, self.value(x) - other.value(x)) for x in xs]
        tail = self.tail - other.tail
        if tail < 0:
            if tail < -_MONO_SLACK:
                raise BadParams("difference has negative tail slope")
            tail = 0.0
        return MonotonePwl(tuple(xs), _clamp_monotone(ys), tail)


def _first_at_least(ys, c):
    lo, hi = 0, len(ys)
    while lo < hi:
        mid = (lo + hi) // 2
        if ys[mid] >= c:
            hi = mid
        else:
            lo = mid + 1
    return lo if lo < len(ys) else None


def _clamp_monotone(ys):
    run = ys[0]
    out = []
    for y in ys:
        run = max(run, y)
        out.append(run)
    return tuple(out)

"""Closed float intervals with outward rounding."""

from __future__ import annotations

import math
from dataclasses import dataclass


def _down(x: float) -> float:
    return math.nextafter(x, -math.inf) if x != 0 else 0.0


def _up(x: float) -> float:
    return math.nextafter(x, math.inf) if x != 0 else 0.0


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if math.isnan(lo) or math.isnan(hi) or lo > hi:
            raise ValueError(f"invalid interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def point(cls, v) -> "Interval":
        v = float(v)
        return cls(v, v)

    @classmethod
    def around(cls, v, rel: float) -> "Interval":
        """Enclosure of a nonnegative value known to relative accuracy ``rel``."""
        v = float(v)
        return cls(_down(v * (1 - rel)), _up(v * (1 + rel)))

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, v) -> bool:
        return self.lo <= float(v) <= self.hi

    def __contains__(self, v) -> bool:
        return self.contains(v)

    def encloses(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def __add__(self, other):
        o = other if isinstance(other, Interval) else Interval.point(other)
        return Interval(_down(self.lo + o.lo), _up(self.hi + o.hi))

    __radd__ = __add__

    def __mul__(self, other):
        o = other if isinstance(other, Interval) else Interval.point(other)
        ps = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return Interval(_down(min(ps)), _up(max(ps)))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        if self.lo < 0:
            raise ValueError("powers are only defined here for nonnegative intervals")
        return Interval(_down(self.lo**k) if k else 1.0, _up(self.hi**k) if k else 1.0)

    def widen_rel(self, rel: float) -> "Interval":
        return Interval(_down(self.lo - abs(self.lo) * rel), _up(self.hi + abs(self.hi) * rel))

    def as_dict(self) -> dict:
        return {"lo": self.lo, "hi": self.hi}

    def __repr__(self):
        return f"[{self.lo:.12g}, {self.hi:.12g}]"


ZERO = Interval(0.0, 0.0)

"""Truncated formal power series with exact rational coefficients.

A series carries its truncation order explicitly. Binary operations return
a series truncated at the smaller of the two operand orders.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence


class SeriesError(ValueError):
    pass


def _frac(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


@dataclass(frozen=True)
class PowerSeries:
    """Coefficients c[0..order] of sum c[i] x^i + O(x^(order+1))."""

    coeffs: tuple
    order: int

    def __post_init__(self):
        if self.order < 0:
            raise SeriesError("negative truncation order")
        cs = tuple(_frac(c) for c in self.coeffs)[: self.order + 1]
        cs = cs + (Fraction(0),) * (self.order + 1 - len(cs))
        object.__setattr__(self, "coeffs", cs)

    @classmethod
    def from_list(cls, coeffs: Iterable, order: int | None = None) -> "PowerSeries":
        cs = list(coeffs)
        return cls(tuple(cs), len(cs) - 1 if order is None else order)

    @classmethod
    def zero(cls, order: int) -> "PowerSeries":
        return cls((), order)

    @classmethod
    def identity(cls, order: int) -> "PowerSeries":
        return cls((0, 1), order)

    def __getitem__(self, i: int) -> Fraction:
        return self.coeffs[i] if 0 <= i <= self.order else Fraction(0)

    def truncate(self, order: int) -> "PowerSeries":
        return PowerSeries(self.coeffs, min(order, self.order))

    def __add__(self, other):
        return series_add(self, other)

    def __sub__(self, other):
        return series_sub(self, other)

    def __mul__(self, other):
        if isinstance(other, PowerSeries):
            return series_mul(self, other)
        return series_scale(self, other)

    __rmul__ = __mul__

    def __neg__(self):
        return series_scale(self, -1)

    def __repr__(self):
        terms = [f"{c}*x^{i}" for i, c in enumerate(self.coeffs) if c]
        return f"PowerSeries({' + '.join(terms) or '0'}; O(x^{self.order + 1}))"


def series_add(a: PowerSeries, b: PowerSeries) -> PowerSeries:
    n = min(a.order, b.order)
    return PowerSeries(tuple(a.coeffs[i] + b.coeffs[i] for i in range(n + 1)), n)


def series_sub(a: PowerSeries, b: PowerSeries) -> PowerSeries:
    n = min(a.order, b.order)
    return PowerSeries(tuple(a.coeffs[i] - b.coeffs[i] for i in range(n + 1)), n)


def series_scale(a: PowerSeries, s) -> PowerSeries:
    s = _frac(s)
    return PowerSeries(tuple(c * s for c in a.coeffs), a.order)


def _int_convolve(p: Sequence[int], q: Sequence[int], n: int) -> list:
    out = [0] * (n + 1)
    nzq = [(j, v) for j, v in enumerate(q[: n + 1]) if v]
    for i, u in enumerate(p[: n + 1]):
        if not u:
            continue
        for j, v in nzq:
            if i + j > n:
                break
            out[i + j] += u * v
    return out


def _scaled(cs: Sequence[Fraction]):
    den = lcm(*(c.denominator for c in cs)) if cs else 1
    return [c.numerator * (den // c.denominator) for c in cs], den


def series_mul(a: PowerSeries, b: PowerSeries) -> PowerSeries:
    """Cauchy product truncated at min(a.order, b.order).

    Coefficients are cleared to a common denominator so the convolution
    runs on integers; the result is identical to the Fraction definition.
    """
    n = min(a.order, b.order)
    pa, da = _scaled(a.coeffs[: n + 1])
    pb, db = _scaled(b.coeffs[: n + 1])
    prod = _int_convolve(pa, pb, n)
    d = da * db
    return PowerSeries(tuple(Fraction(v, d) for v in prod), n)


def series_derive(f: PowerSeries) -> PowerSeries:
    """Formal derivative; the result has order f.order - 1 (0 for constants)."""
    if f.order == 0:
        return PowerSeries.zero(0)
    return PowerSeries(tuple(i * f.coeffs[i] for i in range(1, f.order + 1)), f.order - 1)


def series_integrate(f: PowerSeries) -> PowerSeries:
    """Antiderivative with zero constant term; order grows by one."""
    return PowerSeries((Fraction(0),) + tuple(c / (i + 1) for i, c in enumerate(f.coeffs)), f.order + 1)


def series_reciprocal(f: PowerSeries) -> PowerSeries:
    if f.coeffs[0] == 0:
        raise SeriesError("reciprocal needs a nonzero constant term")
    n = f.order
    inv0 = 1 / f.coeffs[0]
    g = [inv0]
    for m in range(1, n + 1):
        s = sum((f.coeffs[j] * g[m - j] for j in range(1, m + 1)), Fraction(0))
        g.append(-s * inv0)
    return PowerSeries(tuple(g), n)


def series_compose(f: PowerSeries, g: PowerSeries) -> PowerSeries:
    """f(g(x)) by Horner's rule; requires g[0] = 0. Order is min of the two."""
    if g.coeffs[0] != 0:
        raise SeriesError("inner series must have zero constant term")
    n = min(f.order, g.order)
    g = g.truncate(n)
    acc = PowerSeries((f[n],), n)
    for i in range(n - 1, -1, -1):
        acc = series_mul(acc, g)
        acc = PowerSeries((acc.coeffs[0] + f[i],) + acc.coeffs[1:], n)
    return acc


def _check_invertible(f: PowerSeries):
    if f.order < 1 or f.coeffs[0] != 0 or f.coeffs[1] == 0:
        raise SeriesError("reversion needs f[0] = 0 and f[1] != 0")


def series_reversion(f: PowerSeries) -> PowerSeries:
    """Compositional inverse g with f(g(x)) = x + O(x^(order+1)).

    Newton iteration g <- g - (f(g) - x) / f'(g), doubling the number of
    correct coefficients each step.
    """
    _check_invertible(f)
    n = f.order
    df = series_derive(f)
    g = PowerSeries((0, 1 / f.coeffs[1]), min(n, 1))
    prec = 1
    while prec < n:
        prec = min(2 * prec, n)
        g = PowerSeries(g.coeffs, prec)
        fg = series_compose(f.truncate(prec), g)
        resid = series_sub(fg, PowerSeries.identity(prec))
        # f'(g) is only needed to half precision, but the saving is small
        dfg = series_compose(PowerSeries(df.coeffs, prec), g)
        g = series_sub(g, series_mul(resid, series_reciprocal(dfg)))
    return PowerSeries(g.coeffs, n)


def series_reversion_naive(f: PowerSeries) -> PowerSeries:
    """Reference reversion by matching coefficients of f(g) = x one at a time."""
    _check_invertible(f)
    n = f.order
    g = [Fraction(0), 1 / f.coeffs[1]]
    for m in range(2, n + 1):
        trial = PowerSeries(tuple(g) + (Fraction(0),), m)
        c = series_compose(f.truncate(m), trial).coeffs[m]
        g.append(-c / f.coeffs[1])
    return PowerSeries(tuple(g[: n + 1]), n)

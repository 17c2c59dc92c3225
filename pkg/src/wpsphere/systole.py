"""Systole of a random punctured sphere: limit law and finite-n bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .bessel import alpha_closed
from .intervals import Interval
from .moments import SIMPLE_REGIME, sinh_integral_upper
from .volumes import VolumeTable, get_table


class SystoleError(ValueError):
    pass


def _alpha(alpha):
    return float(alpha_closed()) if alpha is None else float(alpha)


def sys_cdf_limit(x: float, alpha: float | None = None) -> float:
    """1 - exp(-alpha x^2 / 2)."""
    if x < 0:
        raise SystoleError("x must be nonnegative")
    return -math.expm1(-_alpha(alpha) * x * x / 2)


def _adaptive_simpson(f, a, b, tol, depth=50):
    def simpson(fa, fm, fb, a, b):
        return (b - a) / 6 * (fa + 4 * fm + fb)

    def rec(a, b, fa, fm, fb, whole, tol, depth):
        m = (a + b) / 2
        lm, rm = (a + m) / 2, (m + b) / 2
        flm, frm = f(lm), f(rm)
        left = simpson(fa, flm, fm, a, m)
        right = simpson(fm, frm, fb, m, b)
        if depth <= 0 or abs(left + right - whole) <= 15 * tol:
            return left + right + (left + right - whole) / 15
        return rec(a, m, fa, flm, fm, left, tol / 2, depth - 1) + rec(m, b, fm, frm, fb, right, tol / 2, depth - 1)

    fa, fb, fm = f(a), f(b), f((a + b) / 2)
    return rec(a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, depth)


def expected_systole_limit(alpha: float | None = None, tol: float = 1e-13) -> float:
    """int_0^inf exp(-alpha x^2/2) dx: adaptive Simpson on [0, 8/sqrt(alpha)] plus the Gaussian tail."""
    al = _alpha(alpha)
    cut = 8 / math.sqrt(al)
    body = _adaptive_simpson(lambda x: math.exp(-al * x * x / 2), 0.0, cut, tol)
    tail = math.sqrt(math.pi / (2 * al)) * math.erfc(cut * math.sqrt(al / 2))
    return body + tail


def _check_length(L: float):
    if not 0 <= L < SIMPLE_REGIME:
        raise SystoleError(f"length {L} outside [0, 2 arcsinh 1)")


def _pair_length_interval(L: float, power: int) -> Interval:
    if L == 0:
        return Interval(0.0, 0.0)
    lo = math.nextafter(L * L / 2, 0.0)
    hi = max(sinh_integral_upper(0.0, L), lo)
    return Interval(lo, hi) ** power


def _ratio_interval(table: VolumeTable, value: float, n: int, m: int) -> Interval:
    rel = 2 * table.sigma_rel_error(n) + 8 * 2.0**-52
    return Interval.around(value, rel)


def expected_pair_count(n: int, L: float, table: VolumeTable | None = None) -> Interval:
    """E[N2(X, L)]: geodesics of length <= L cutting off two cusps.

    C(n,2) V_{n-1}/V_n = (n-1) x0/2 * sigma_{n-1}/sigma_n, times
    [L^2/2, int_0^L 4 sinh^2(x/2)/x dx].
    """
    if n < 4:
        raise SystoleError("need n >= 4")
    _check_length(L)
    table = table or get_table()
    coef = (n - 1) * table.x0f / 2 * table.sigma(n - 1) / table.sigma(n)
    return _ratio_interval(table, coef, n, 1) * _pair_length_interval(L, 1)


def second_factorial_pair_count(n: int, L: float, table: VolumeTable | None = None) -> Interval:
    """E[(N2)_2]: ordered pairs of such geodesics.

    Two short geodesics cutting off two cusps each are disjoint, so the
    middle piece has n - 4 cusps and 2 boundaries: n!/(4 (n-4)!) V_{n-2}/V_n.
    """
    if n < 7:
        raise SystoleError("need n >= 7")
    _check_length(L)
    table = table or get_table()
    x0 = table.x0f
    coef = (n - 2) * (n - 3) * x0 * x0 / 4 * table.sigma(n - 2) / table.sigma(n)
    return _ratio_interval(table, coef, n, 2) * _pair_length_interval(L, 2)


@dataclass(frozen=True)
class SystoleBoundReport:
    n: int
    c_n: float
    expected_N2: Interval
    second_factorial_N2: Interval
    tail_probability_upper: float
    raw_ratio: float
    endpoint_flag: bool

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "c_n": self.c_n,
            "expected_N2": self.expected_N2.as_dict(),
            "second_factorial_N2": self.second_factorial_N2.as_dict(),
            "tail_probability_upper": self.tail_probability_upper,
            "raw_ratio": self.raw_ratio,
            "endpoint_flag": self.endpoint_flag,
        }


def second_moment_ratio(first: Interval, second: Interval) -> tuple:
    """Conservative (E2.hi + E.hi - E.lo^2) / (E2.lo + E.lo), its clamp to [0, 1], and a flag.

    The flag marks E.lo^2 > E.hi + E2.hi, where the endpoint combination no
    longer corresponds to any pair of exact values.
    """
    num = second.hi + first.hi - first.lo * first.lo
    den = second.lo + first.lo
    raw = math.inf if den <= 0 else math.nextafter(num / den, math.inf)
    flag = first.lo * first.lo > first.hi + second.hi
    return raw, min(1.0, max(0.0, raw)), flag


def systole_tail_bound(n: int, c_n: float, table: VolumeTable | None = None) -> SystoleBoundReport:
    """Second-moment bound on P[sys(X) > c_n / sqrt(n)]."""
    L = c_n / math.sqrt(n)
    e1 = expected_pair_count(n, L, table)
    e2 = second_factorial_pair_count(n, L, table)
    raw, clamped, flag = second_moment_ratio(e1, e2)
    return SystoleBoundReport(n, c_n, e1, e2, clamped, raw, flag)


def tail_envelope(n: int, cs, table: VolumeTable | None = None) -> list:
    """bound(c) * c^2 over ``cs``; bounded when the tail decays like c^-2."""
    return [systole_tail_bound(n, c, table).tail_probability_upper * c * c for c in cs]


def schmutz_bound(n: int) -> float:
    """4 arcosh((3n - 6)/n)."""
    if n < 4:
        raise SystoleError("the bound degenerates for n = 3; need n >= 4")
    return 4 * math.acosh((3 * n - 6) / n)


def crude_log_bound(n: int) -> float:
    """2 log(2 (n - 1))."""
    if n < 2:
        raise SystoleError("need n >= 2")
    return 2 * math.log(2 * (n - 1))

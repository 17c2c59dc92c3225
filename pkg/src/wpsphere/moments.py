"""Factorial moments of short separating-geodesic counts at finite n.

Every expectation is a sum over multicurve types of volume ratios times a
length integral, and the boundary-length dependence of each piece volume
is replaced by the sinh sandwich.  Written with sigma_m = V_m x0^m / m!,
the unnested k-moment is

    C_k x0^(-2k) sum_{c_1..c_k} prod (c_i+1) sigma_{c_i+1}
        * (r+k)!/r! * sigma_{r+k} / sigma_n * [lo^k, hi^k],   r = n - sum c,

which is a k-fold convolution evaluated with numpy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np
from mpmath import mp, mpf

from .bessel import LengthWindow, cosh_integral_series, lambda_window
from .intervals import ZERO, Interval
from .multicurves import boundary_profiles, symmetry_of, tree_count, unnested_last_min
from .volumes import VolumeTable, get_table

SIMPLE_REGIME = 2 * math.asinh(1.0)
EPS = 2.0**-52


class MomentError(ValueError):
    pass


@dataclass(frozen=True)
class MomentRequest:
    n: int
    k: int
    window: LengthWindow
    c_max: int | None = None

    def __post_init__(self):
        if self.n < 3 or self.k < 1:
            raise MomentError("need n >= 3 and k >= 1")
        if self.window.b / math.sqrt(self.n) >= SIMPLE_REGIME:
            raise MomentError("window leaves the simple-geodesic regime b/sqrt(n) < 2 arcsinh 1")
        if self.c_max is not None and self.c_max < 2:
            raise MomentError("c_max must be at least 2")


@dataclass(frozen=True)
class MomentResult:
    unnested: Interval
    nested_upper: float
    total: Interval
    lambda_k: float
    truncation_tail: float

    def as_dict(self) -> dict:
        return {
            "unnested": self.unnested.as_dict(),
            "nested_upper": self.nested_upper,
            "total": self.total.as_dict(),
            "lambda_k": self.lambda_k,
            "truncation_tail": self.truncation_tail,
        }


def _up(x: float) -> float:
    return math.nextafter(x, math.inf) if x else 0.0


def _down(x: float) -> float:
    return math.nextafter(x, -math.inf) if x else 0.0


def sinh_integral_upper(t_lo: float, t_hi: float) -> float:
    """int_{t_lo}^{t_hi} 4 sinh^2(x/2)/x dx = 2 (S(t_hi) - S(t_lo)), S the cosh series."""
    with mp.workdps(30):
        v = 2 * (cosh_integral_series(t_hi, 25) - cosh_integral_series(t_lo, 25))
        return _up(_up(float(v)))


def length_integral_interval(window: LengthWindow, n: int, power: int = 1) -> Interval:
    """[(b^2 - a^2)/(2n), int_{a/sqrt n}^{b/sqrt n} 4 sinh^2(x/2)/x dx], raised to ``power``."""
    if window.degenerate:
        return ZERO
    if window.b / math.sqrt(n) >= SIMPLE_REGIME:
        raise MomentError("window leaves the simple-geodesic regime")
    with mp.workdps(30):
        lo = float((mpf(window.b) ** 2 - mpf(window.a) ** 2) / (2 * n))
    hi = sinh_integral_upper(window.a / math.sqrt(n), window.b / math.sqrt(n))
    iv = Interval(_down(lo), max(hi, _up(lo)))
    return iv**power


def _falling_ratio(r: np.ndarray, k: int) -> np.ndarray:
    """(r + k)! / r! elementwise."""
    out = np.ones_like(r, dtype=float)
    for i in range(1, k + 1):
        out *= r + i
    return out


def _unnested_pieces(table: VolumeTable, n: int, k: int):
    sig = table.sigma_array(n + k)
    c = np.arange(n + 1)
    a = np.zeros(n + 1)
    a[2:] = (c[2:] + 1) * sig[3 : n + 2]
    s = np.arange(n + 1)
    r = n - s
    w = _falling_ratio(r.astype(float), k) * sig[np.clip(r + k, 0, None)] / sig[n]
    w[(r < unnested_last_min(k)) | (r + k < 3)] = 0.0
    return a, w


def _conv_power(first: np.ndarray, a: np.ndarray, k: int, n: int) -> np.ndarray:
    acc = first[: n + 1]
    for _ in range(k - 1):
        acc = np.convolve(acc, a)[: n + 1]
    return acc


def _rel_guard(table: VolumeTable, n: int, k: int) -> float:
    tier = max(table.sigma_rel_error(m) for m in (n, n + k, min(n, table.n_float) + 1))
    return (2 * k + 3) * tier + 4 * (k + 2) * (n + 1) * EPS


def unnested_factorial_moment(req: MomentRequest, table: VolumeTable | None = None):
    """(interval, truncation_tail) for the unnested part of E[(N)_k].

    Without ``c_max`` (and always for k = 1) the whole sum is evaluated and
    the tail is 0.  With ``c_max`` the sum keeps tuples with every
    c_i <= c_max; the discarded tuples each have some c_i > c_max, so by a
    union bound their weight is at most k times the sum with c_1 > c_max,
    which is evaluated exactly at the upper length endpoint.
    """
    n, k = req.n, req.k
    if n < 2 * k:
        raise MomentError(f"infeasible: n = {n} < 2k = {2 * k}")
    if req.window.degenerate:
        return ZERO, 0.0
    table = table or get_table()
    a, w = _unnested_pieces(table, n, k)
    lengths = length_integral_interval(req.window, n, k)
    scale = (0.5 if k == 1 else 1.0) * table.x0f ** (-2 * k)
    guard = _rel_guard(table, n, k)

    truncate = k >= 2 and req.c_max is not None and req.c_max < n
    if truncate:
        a_in = a.copy()
        a_in[req.c_max + 1 :] = 0.0
        a_out = a - a_in
    else:
        a_in = a
    core = scale * float(np.dot(_conv_power(a_in, a_in, k, n), w))
    iv = (Interval.around(core, guard) * lengths) if core > 0 else ZERO
    tail = 0.0
    if truncate:
        rest = scale * float(np.dot(_conv_power(a_out, a, k, n), w))
        tail = _up(k * rest * (1 + guard) * lengths.hi)
    return iv, tail


def nested_factorial_moment_upper(req: MomentRequest, table: VolumeTable | None = None) -> float:
    """Upper bound for the nested part of E[(N)_k]; 0 for k = 1, 2.

    For a boundary profile D (multiset of d's) the weight of a piece with c
    cusps is G_d(c) = sigma_{c+d} (c+d)!/c!, so the ordered sum over cusp
    counts is the coefficient of z^n in prod_d G_d(z)^mult(d).  Each profile
    carries the labeled-tree count and 1/prod mult(d)!, and orderings of
    the k curves give k!.  Every curve is bounded on both sides by the
    sinh sandwich, which yields the 4 sinh^2(x/2)/x integral per curve.
    """
    n, k = req.n, req.k
    if k <= 2 or req.window.degenerate:
        return 0.0
    table = table or get_table()
    sig = table.sigma_array(n + k)
    c = np.arange(n + 1, dtype=float)
    total = 0.0
    for prof in boundary_profiles(k):
        weight = tree_count(list(prof)) / symmetry_of(prof)
        acc = None
        for d in prof:
            g = sig[d : n + d + 1] * _falling_ratio(c, d)
            g[: max(0, 3 - d)] = 0.0
            acc = g if acc is None else np.convolve(acc, g)[: n + 1]
        total += weight * acc[n]
    total *= math.factorial(k) * table.x0f ** (-2 * k) / sig[n]
    hi = length_integral_interval(req.window, n, k).hi
    return _up(total * hi * (1 + _rel_guard(table, n, k + 1)))


def nested_upper_by_enumeration(req: MomentRequest, table: VolumeTable | None = None) -> float:
    """Same bound summed type by type over enumerate_nested_types (slow reference)."""
    from .multicurves import enumerate_nested_types

    table = table or get_table()
    if req.k <= 2 or req.window.degenerate:
        return 0.0
    hi = length_integral_interval(req.window, req.n, req.k).hi
    total = mpf(0)
    with mp.workdps(40):
        vn = table.volume_mpf(req.n)
        for coll in enumerate_nested_types(req.k, req.n):
            prod = mpf(coll.orbit_weight())
            for p in coll.pieces:
                prod *= table.volume_mpf(p.c + p.d)
            total += prod / vn
        return float(total) * hi


def factorial_moment(req: MomentRequest, table: VolumeTable | None = None) -> MomentResult:
    lam = float(lambda_window(req.window)) ** req.k
    if req.window.degenerate:
        return MomentResult(ZERO, 0.0, ZERO, lam, 0.0)
    unn, tail = unnested_factorial_moment(req, table)
    nested = nested_factorial_moment_upper(req, table)
    total = Interval(unn.lo, _up(_up(unn.hi + nested) + tail))
    return MomentResult(unn, nested, total, lam, tail)


def convergence_report(k: int, window: LengthWindow, n_schedule, c_max: int | None = None, table=None) -> list:
    """Per n: the moment interval, |mid - lambda^k| and sqrt(n) |mid - lambda^k|."""
    ns = list(n_schedule)
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise MomentError("n_schedule must be increasing")
    rows = []
    for n in ns:
        res = factorial_moment(MomentRequest(n, k, window, c_max), table)
        err = abs(res.total.mid - res.lambda_k)
        rows.append(
            {
                "n": n,
                "k": k,
                "lo": res.total.lo,
                "hi": res.total.hi,
                "mid": res.total.mid,
                "nested_upper": res.nested_upper,
                "truncation_tail": res.truncation_tail,
                "lambda_k": res.lambda_k,
                "error": err,
                "normalized_error": math.sqrt(n) * err,
            }
        )
    return rows


def alpha_partial_sum(n_terms: int, table: VolumeTable | None = None):
    """sum_{i=2}^{n_terms+1} V_{i+1} x0^(i-1) / i! at table precision."""
    table = table or get_table()
    if n_terms + 2 > table.n_float:
        raise MomentError("volume table too short")
    with mp.workdps(table.precision + 10):
        total = mpf(0)
        for i in range(2, n_terms + 2):
            v = table.volume(i + 1)
            v = mpf(v.numerator) / v.denominator if hasattr(v, "numerator") else v
            total += v * table.x0 ** (i - 1) / mpmath.factorial(i)
        return total


def alpha_partial_with_tail(n_terms: int, table: VolumeTable | None = None, scan_to: int = 20000) -> Interval:
    """[partial, partial + tail] enclosing alpha.

    A term with c cusps equals x0^-2 (c+1) s_{c+1} (c+2)^(-7/2), so the tail
    over c >= n_terms + 2 is at most x0^-2 S (zeta(5/2, N) - zeta(7/2, N)),
    N = n_terms + 4, with S the larger of B0 + u and the largest s_m seen
    between the cutoff and ``scan_to``.
    """
    table = table or get_table()
    part = alpha_partial_sum(n_terms, table)
    b0 = table.B0_estimate
    first = n_terms + 3
    s_seen = float(np.max(table.s_scaled(np.arange(first, max(scan_to, first) + 1))))
    s_bound = max(b0.value + b0.uncertainty, s_seen)
    with mp.workdps(30):
        start = mpf(n_terms + 4)
        zsum = mpmath.zeta(mpf(5) / 2, start) - mpmath.zeta(mpf(7) / 2, start)
        tail = float(zsum) * s_bound / table.x0f**2
    p = float(part)
    return Interval(_down(p), _up(_up(p) + _up(tail)))


def poisson_pmf(lam: float, m: int) -> float:
    if lam < 0 or m < 0:
        raise ValueError("need lambda >= 0 and m >= 0")
    if lam == 0:
        return 1.0 if m == 0 else 0.0
    return math.exp(m * math.log(lam) - lam - math.lgamma(m + 1))


def poisson_compare(k_max: int, window: LengthWindow, n: int, c_max: int | None = None, table=None) -> list:
    """Moment intervals for k = 1..k_max next to the Poisson factorial moments lambda^k."""
    rows = []
    for k in range(1, k_max + 1):
        res = factorial_moment(MomentRequest(n, k, window, c_max), table)
        rows.append(
            {
                "k": k,
                "lo": res.total.lo,
                "hi": res.total.hi,
                "lambda_k": res.lambda_k,
                "contains_lambda_k": res.total.contains(res.lambda_k),
            }
        )
    return rows

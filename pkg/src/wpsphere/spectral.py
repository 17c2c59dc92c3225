"""Small eigenvalues from families of short geodesics cutting off two cusps.

A surface with K such geodesics of length <= eps/6 has lambda_{K-1} < eps
(eps < 1/4).  The probability that no K-family of length <= L/sqrt(n)
exists is bounded by the second moment method.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .bessel import bessel_constants
from .intervals import Interval
from .moments import SIMPLE_REGIME, sinh_integral_upper
from .systole import second_moment_ratio
from .volumes import VolumeTable, get_table


class SpectralError(ValueError):
    pass


def criterion_length(epsilon: float) -> float:
    if not 0 < epsilon < 0.25:
        raise SpectralError("epsilon must lie in (0, 1/4)")
    return epsilon / 6


def zk_collar_volume(epsilon: float) -> float:
    """(5/6) eps sinh(1)."""
    if epsilon < 0:
        raise SpectralError("epsilon must be nonnegative")
    return 5 / 6 * epsilon * math.sinh(1.0)


@dataclass(frozen=True)
class SpectralBoundRequest:
    n: int
    k: int
    L: float
    epsilon: float

    def __post_init__(self):
        if self.L / math.sqrt(self.n) > criterion_length(self.epsilon):
            raise SpectralError("length budget exceeds eps/6")


def expected_separating_multicurves(n: int, m: int, L: float, table: VolumeTable | None = None) -> Interval:
    """E of the number of ordered m-tuples of disjoint two-cusp geodesics of length <= L/sqrt(n).

    n!/(2^m (n-2m)!) V_{n-m}/V_n = (n-m)!/(2^m (n-2m)!) x0^m sigma_{n-m}/sigma_n,
    times [(L^2/(2n))^m, (int_0^{L/sqrt n} 4 sinh^2(x/2)/x dx)^m].
    """
    if m < 1:
        raise SpectralError("m must be >= 1")
    if n < 2 * m + 3:
        raise SpectralError(f"infeasible: n = {n} < 2m + 3 = {2 * m + 3}")
    t = L / math.sqrt(n)
    if not 0 <= t < SIMPLE_REGIME:
        raise SpectralError("L/sqrt(n) outside the simple-geodesic regime")
    if L == 0:
        return Interval(0.0, 0.0)
    table = table or get_table()
    x0 = table.x0f
    coef = table.sigma(n - m) / table.sigma(n)
    for i in range(m):
        coef *= (n - m - i) * x0 / 2
    rel = 2 * table.sigma_rel_error(n) + (4 * m + 8) * 2.0**-52
    lo = math.nextafter(L * L / (2 * n), 0.0)
    hi = max(sinh_integral_upper(0.0, t), lo)
    return Interval.around(coef, rel) * (Interval(lo, hi) ** m)


def second_moment_sum(n: int, k: int, L: float, table=None) -> Interval:
    """sum_{s=0}^k (k!/s!) C(k, s) E[N^(k+s)]: the second moment of the k-tuple count."""
    out = Interval(0.0, 0.0)
    for s in range(k + 1):
        w = math.factorial(k) // math.factorial(s) * math.comb(k, s)
        out = out + w * expected_separating_multicurves(n, k + s, L, table)
    return out


def prob_no_k_family_details(n: int, k: int, L: float, table=None) -> dict:
    if k < 1:
        raise SpectralError("k must be >= 1")
    if n < 4 * k + 3:
        raise SpectralError(f"infeasible: n = {n} < 4k + 3 = {4 * k + 3}")
    ek = expected_separating_multicurves(n, k, L, table)
    if k == 1:
        e2 = expected_separating_multicurves(n, 2, L, table)
        raw, clamped, _ = second_moment_ratio(ek, e2)
        total = ek + e2
    else:
        total = second_moment_sum(n, k, L, table)
        num = total.hi - ek.lo * ek.lo
        raw = math.inf if total.lo <= 0 else math.nextafter(num / total.lo, math.inf)
        clamped = min(1.0, max(0.0, raw))
    return {
        "n": n,
        "k": k,
        "L": L,
        "expected_k": ek.as_dict(),
        "second_moment": total.as_dict(),
        "raw_ratio": raw,
        "bound": clamped,
        "majorant": majorant(k, L, table),
    }


def prob_no_k_family_upper(n: int, k: int, L: float, table=None) -> float:
    """Upper bound on P[no k-family of two-cusp geodesics of length <= L/sqrt(n)]."""
    return prob_no_k_family_details(n, k, L, table)["bound"]


def majorant(k: int, L: float, table=None) -> float:
    """exp(4 k^2 / (x0 L^2)) - 1."""
    x0 = table.x0f if table is not None else float(bessel_constants().x0)
    if L <= 0:
        return math.inf
    expo = 4 * k * k / (x0 * L * L)
    return math.expm1(expo) if expo < 700 else math.inf


def schedule_length(n: int, epsilon: float) -> float:
    """Unscaled length budget min(sqrt(n) eps/6, n^0.3)."""
    return min(math.sqrt(n) * criterion_length(epsilon), n**0.3)


def min_n_for_small_eigenvalues(k: int, epsilon: float, delta: float, n_max: int = 10**7, table=None):
    """Smallest n with bound(n, k+1, L(n)) <= delta, or None if none up to ``n_max``.

    Guaranteeing lambda_k < eps needs k+1 short geodesics, so the family
    size is k+1.  Doubling brackets the first n below delta and bisection
    refines it; the bound is nonincreasing in n along the schedule.
    """
    if not 0 < delta < 1:
        raise SpectralError("delta must lie in (0, 1)")
    criterion_length(epsilon)
    size = k + 1
    n0 = 4 * size + 3

    def ok(n):
        return prob_no_k_family_upper(n, size, schedule_length(n, epsilon), table) <= delta

    lo, hi = n0 - 1, n0
    while not ok(hi):
        if hi >= n_max:
            return None
        lo, hi = hi, min(2 * hi, n_max)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi

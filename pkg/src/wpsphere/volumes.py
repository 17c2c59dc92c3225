"""Genus-zero Weil-Petersson volumes V_{0,n} from the generating function.

x(y) = sqrt(y) J1(2 sqrt(y)) is reverted to y(x) = phi0''(x), and
V_{m+2} = m! [x^m] y(x).  Three tiers are kept:

* exact rationals up to ``n_exact`` (Newton reversion over Fractions),
* ``precision``-digit floats up to ``n_float`` (an O(N^2) recurrence),
* double precision beyond, from the square-root singularity of y at x0.

Downstream code mostly works with the scaled volumes
sigma_n = V_n x0^n / n!, which behave like B0 n^(-7/2).
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import mpmath
import numpy as np
from mpmath import mp, mpf

from .bessel import DEFAULT_PRECISION, bessel_constants
from .intervals import Interval
from .series import PowerSeries, series_reversion

CONVENTION = "manin-zograf-genus0"
ASYMPTOTIC_TERMS = 41
# relative accuracy claimed for sigma_n from each tier (checked in tests)
FLOAT_TIER_REL = 1e-14
ASYMPTOTIC_TIER_REL = 1e-12


class VolumeTableError(ValueError):
    pass


def x_of_y_series(order: int) -> PowerSeries:
    """sum_{k>=0} (-1)^k y^(k+1) / (k! (k+1)!) truncated at ``order``."""
    if order < 1:
        raise ValueError("order must be >= 1")
    cs = [Fraction(0)]
    for k in range(order):
        cs.append(Fraction((-1) ** k, math.factorial(k) * math.factorial(k + 1)))
    return PowerSeries(tuple(cs), order)


def ode_reversion(order: int, one):
    """Coefficients y_0..y_order of y(x), the inverse of x(y).

    With F(y) = J0(2 sqrt y) we have x'(y) = F(y) and y F'' + F' + F = 0.
    Tracking P = F(y(x)) and Q = F'(y(x)) gives three coupled linear
    recurrences (P y' = 1, P' = Q y', y Q' = -(P + Q) y') that produce one
    new coefficient each per step.  ``one`` fixes the number type, e.g.
    Fraction(1) or mpf(1).
    """
    zero = one * 0
    y = [zero, one]
    P = [one]
    Q = [-one]
    for m in range(1, order):
        P.append(sum((Q[j] * (m - j) * y[m - j] for j in range(m)), zero) / m)
        s = P[m]
        for j in range(1, m):
            s += (Q[j] + P[j]) * (m - j + 1) * y[m - j + 1]
        for i in range(2, m + 1):
            s += y[i] * (m - i + 1) * Q[m - i + 1]
        Q.append(-s / (m + 1))
        t = zero
        for j in range(1, m + 1):
            t += P[j] * (m - j + 1) * y[m - j + 1]
        y.append(-t / ((m + 1) * P[0]))
    return y[: order + 1]


def puiseux_coefficients(precision: int = DEFAULT_PRECISION, terms: int = ASYMPTOTIC_TERMS):
    """Coefficients beta_j of y = y0 + sum_j beta_j (x0 - x)^(j/2) near x0."""
    c = bessel_constants(precision)
    with mp.workdps(precision + 20):
        y0 = c.j0**2 / 4
        # Taylor coefficients of F at y0
        f = [mpf(0), -2 * c.J1_at_j0 / c.j0]
        for r in range(terms + 2):
            f.append(-((r + 1) ** 2 * f[r + 1] + f[r]) / (y0 * (r + 2) * (r + 1)))
        # x(y0 + u) - x0 = sum_{r>=2} cr u^r with cr = f_{r-1}/r
        g = [-f[r + 1] / (r + 2) for r in range(terms + 1)]
        s = [mpmath.sqrt(g[0])]
        for i in range(1, terms + 1):
            acc = g[i] - sum(s[j] * s[i - j] for j in range(1, i))
            s.append(acc / (2 * s[0]))
        # w = sqrt(x0 - x) = -u s(u), the branch with u < 0 for x < x0.
        # Lagrange inversion: beta_j = (1/j) [u^(j-1)] h^j with h = -1/s.
        h = [-1 / s[0]]
        for i in range(1, terms):
            h.append(-sum(s[j] * h[i - j] for j in range(1, i + 1)) / s[0])
        beta = [mpf(0)]
        power = [mpf(1)] + [mpf(0)] * (terms - 1)
        for j in range(1, terms + 1):
            power = [sum(power[i] * h[m - i] for i in range(m + 1)) for m in range(terms)]
            beta.append(power[j - 1] / j)
        return beta


@dataclass
class B0Estimate:
    value: float
    uncertainty: float
    points: tuple
    pair_estimates: tuple

    def as_dict(self):
        return {
            "value": self.value,
            "uncertainty": self.uncertainty,
            "points": list(self.points),
            "pair_estimates": list(self.pair_estimates),
        }


@dataclass
class VolumeTable:
    exact: dict
    floats: dict
    n_exact: int
    n_float: int
    precision: int
    x0: mpf
    _sigma: np.ndarray = field(default=None, repr=False)
    _asym: np.ndarray = field(default=None, repr=False)
    _b0: B0Estimate = field(default=None, repr=False)

    def __post_init__(self):
        x0 = self.x0
        with mp.workdps(self.precision + 10):
            sig = [mpf(1), x0, x0**2 / 2]
            for n in range(3, self.n_float + 1):
                sig.append(self.floats[n] * x0**n / mpmath.factorial(n))
        self._sigma = np.array([float(s) for s in sig])
        self.x0f = float(x0)

    # access

    def volume(self, n: int):
        """V_{0,n}; Fraction when exact, mpf in the float tier, else mpf from sigma."""
        if n in (0, 1, 2):
            return Fraction(1)
        if n in self.exact:
            return self.exact[n]
        if n in self.floats:
            return self.floats[n]
        if n < 0:
            raise VolumeTableError("negative n")
        with mp.workdps(20):
            return mpf(self.sigma(n)) * mpmath.factorial(n) / mpf(self.x0) ** n

    def volume_mpf(self, n: int):
        v = self.volume(n)
        return mpf(v.numerator) / v.denominator if isinstance(v, Fraction) else v

    def sigma_array(self, nmax: int) -> np.ndarray:
        """sigma_0..sigma_nmax as float64; extends through the asymptotic tier."""
        if nmax >= len(self._sigma):
            size = max(nmax + 1, 2 * len(self._sigma))
            self._sigma = np.concatenate([self._sigma, self._asymptotic_sigma(len(self._sigma), size)])
        return self._sigma[: nmax + 1]

    def sigma(self, n):
        n = np.asarray(n)
        arr = self.sigma_array(int(n.max()) if n.size else 0)
        out = arr[n]
        return float(out) if out.ndim == 0 else out

    def sigma_rel_error(self, n: int) -> float:
        if n <= self.n_exact or n <= 2:
            return 2.3e-16
        return FLOAT_TIER_REL if n <= self.n_float else ASYMPTOTIC_TIER_REL

    def s_scaled(self, n):
        """s_n = V_n x0^n (n+1)^(7/2) / n!."""
        n = np.asarray(n, dtype=float)
        return self.sigma(n.astype(int)) * (n + 1) ** 3.5

    def log_volume_ratio(self, a: int, b: int) -> float:
        """log(V_a / V_b)."""
        return (
            math.lgamma(a + 1)
            - math.lgamma(b + 1)
            + (b - a) * math.log(self.x0f)
            + math.log(self.sigma(a))
            - math.log(self.sigma(b))
        )

    def _asymptotic_sigma(self, start: int, stop: int) -> np.ndarray:
        if self._asym is None:
            beta = puiseux_coefficients(self.precision)
            with mp.workdps(self.precision + 10):
                ks = []
                for j in range(1, len(beta), 2):
                    ks.append(float(beta[j] * self.x0 ** (mpf(j) / 2) / mpmath.gamma(-mpf(j) / 2)))
            self._asym = np.array(ks)
        m = np.arange(start, stop)
        q = (m - 2).astype(float)
        # R1(q) = Gamma(q - 1/2) / Gamma(q + 1), seeded exactly and carried by products
        with mp.workdps(30):
            seed = float(mpmath.gamma(mpf(q[0]) - mpf(1) / 2) / mpmath.gamma(mpf(q[0]) + 1))
        steps = (q[:-1] + 0.5 - 1.0) / (q[:-1] + 1.0)
        r1 = seed * np.concatenate([[1.0], np.cumprod(steps)])
        total = np.zeros_like(q)
        r = r1
        for idx, kj in enumerate(self._asym):
            j = 2 * idx + 1
            total += kj * r
            r = r / (q - j / 2 - 1)
        return self.x0f**2 / (m * (m - 1.0)) * total

    # diagnostics

    @property
    def B0_estimate(self) -> B0Estimate:
        if self._b0 is None:
            top = self.n_float
            self._b0 = estimate_B0(self, (top - 100, top - 50, top))
        return self._b0


def build_volume_table(
    n_exact: int = 64, n_float: int = 400, precision: int = 60
) -> VolumeTable:
    """Exact volumes to ``n_exact`` and ``precision``-digit floats to ``n_float``."""
    if n_exact < 6:
        raise VolumeTableError("n_exact must be at least 6")
    if n_float < n_exact:
        raise VolumeTableError("n_float must be >= n_exact")
    y = series_reversion(x_of_y_series(n_exact - 2))
    exact = {m + 2: math.factorial(m) * y.coeffs[m] for m in range(1, n_exact - 1)}
    c = bessel_constants(max(precision, DEFAULT_PRECISION))
    with mp.workdps(precision + 10):
        ym = ode_reversion(n_float - 2, mpf(1))
        floats = {m + 2: mpmath.factorial(m) * ym[m] for m in range(1, n_float - 1)}
    return VolumeTable(exact, floats, n_exact, n_float, precision, c.x0)


def exact_volumes_by_recurrence(n_max: int) -> dict:
    y = ode_reversion(n_max - 2, Fraction(1))
    return {m + 2: math.factorial(m) * y[m] for m in range(1, n_max - 1)}


def mz_asymptotic(n: int, B0, x0=None, precision: int = DEFAULT_PRECISION):
    """n! (n+1)^(-7/2) x0^(-n) B0."""
    if n < 3:
        raise ValueError("n must be >= 3")
    if x0 is None:
        x0 = bessel_constants(precision).x0
    with mp.workdps(precision + 10):
        return mpmath.factorial(n) * mpf(n + 1) ** (-mpf(7) / 2) * mpf(x0) ** (-n) * mpf(B0)


def B0_from_singularity(precision: int = DEFAULT_PRECISION) -> float:
    """Leading constant x0^(5/2) sqrt(j0/J1(j0)) / (2 sqrt(pi)) of the square-root singularity."""
    c = bessel_constants(precision)
    with mp.workdps(precision + 10):
        return float(c.x0 ** (mpf(5) / 2) * mpmath.sqrt(c.j0 / c.J1_at_j0) / (2 * mpmath.sqrt(mpmath.pi)))


def _pair_estimate(n1, s1, n2, s2):
    return (n2 * s2 - n1 * s1) / (n2 - n1)


def estimate_B0(table, points=(300, 350, 400), s_values=None) -> B0Estimate:
    """Fit s_n = B0 + c/n on consecutive pairs of ``points``.

    The value is the estimate from the last pair.  If s_n carries a d/n^2
    term, pair (a, b) is off by about -d/(a b), so the last estimate's error
    is n_0/(n_2 - n_0) times the spread of the last two estimates; the
    reported uncertainty is the spread times (1 + n_0/(n_2 - n_0)).
    ``s_values`` may replace the table by a mapping n -> s_n.
    """
    pts = tuple(int(p) for p in points)
    if len(pts) < 3 or sorted(set(pts)) != list(pts):
        raise VolumeTableError("need at least three increasing points")
    if s_values is None:
        if table.n_float < max(pts):
            raise VolumeTableError("volume table too short for B0 estimation")
        s = {p: float(table.s_scaled(p)) for p in pts}
    else:
        s = {p: float(s_values[p]) for p in pts}
    ests = tuple(_pair_estimate(a, s[a], b, s[b]) for a, b in zip(pts, pts[1:]))
    val = ests[-1]
    n0, n2 = pts[-3], pts[-1]
    unc = (1 + n0 / (n2 - n0)) * abs(ests[-1] - ests[-2])
    if not (math.isfinite(val) and val > 0):
        raise VolumeTableError("B0 estimate is not positive")
    return B0Estimate(val, unc, pts, ests)


def neighbor_volume_ratio(table: VolumeTable, n: int) -> float:
    """r_n = V_n (n - 2) / V_{n+1}; tends to x0 and stays within [0.3, 1.5]."""
    if n < 3:
        raise ValueError("n must be >= 3")
    if n + 1 in table.exact:
        return float(table.exact[n] * (n - 2) / table.exact[n + 1])
    return (n - 2) * math.exp(table.log_volume_ratio(n, n + 1))


ratio_check_lemma23 = neighbor_volume_ratio


def sandwich_ratio(half_lengths) -> Interval:
    """[1, prod sinh(b)/b] enclosing V(2b_1, ..., 2b_n) / V."""
    hi = 1.0
    for b in half_lengths:
        if b < 0:
            raise ValueError("negative boundary length")
        if b > 0:
            hi *= math.sinh(b) / b
    return Interval(1.0, math.nextafter(hi, math.inf) if hi > 1 else 1.0)


# cache

CACHE_ENV = "WPSPHERE_CACHE"
_TABLES: dict = {}


def get_table(n_exact: int = 64, n_float: int = 400, precision: int = 60, cache=None, build: bool = True):
    """Shared table for the given configuration, loaded from ``cache`` when present."""
    key = (n_exact, n_float, precision)
    if key in _TABLES:
        return _TABLES[key]
    path = cache or os.environ.get(CACHE_ENV)
    table = None
    if path and Path(path).exists():
        table = load_table(path, n_exact, n_float, precision)
    elif not build:
        raise VolumeTableError(f"volume cache {path!r} missing and building is disabled")
    if table is None:
        table = build_volume_table(n_exact, n_float, precision)
        if path:
            save_table(table, path)
    _TABLES[key] = table
    return table



def table_to_document(table: VolumeTable) -> dict:
    entries = []
    for n in range(3, table.n_float + 1):
        if n in table.exact:
            v = table.exact[n]
            entries.append({"n": n, "num": str(v.numerator), "den": str(v.denominator)})
        else:
            entries.append(
                {"n": n, "float": mpmath.nstr(table.floats[n], table.precision + 5, strip_zeros=False),
                 "precision_digits": table.precision}
            )
    header = {
        "x0": mpmath.nstr(table.x0, table.precision + 5, strip_zeros=False),
        "convention": CONVENTION,
        "n_exact": table.n_exact,
        "n_float": table.n_float,
        "precision_digits": table.precision,
    }
    return {"header": header, "entries": entries}


def save_table(table: VolumeTable, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(json.dumps(table_to_document(table), sort_keys=True, indent=1))
    tmp.replace(path)


def load_table(path, n_exact=None, n_float=None, precision=None) -> VolumeTable:
    doc = json.loads(Path(path).read_text())
    h = doc["header"]
    if h.get("convention") != CONVENTION:
        raise VolumeTableError(f"unknown volume convention {h.get('convention')!r}")
    want = {"n_exact": n_exact, "n_float": n_float, "precision_digits": precision}
    for key, val in want.items():
        if val is not None and h[key] != val:
            raise VolumeTableError(f"cache built with {key}={h[key]}, requested {val}")
    prec = h["precision_digits"]
    exact, floats = {}, {}
    with mp.workdps(prec + 10):
        for e in doc["entries"]:
            if "num" in e:
                v = Fraction(int(e["num"]), int(e["den"]))
                exact[e["n"]] = v
                floats[e["n"]] = mpf(v.numerator) / v.denominator
            else:
                floats[e["n"]] = mpf(e["float"])
        x0 = mpf(h["x0"])
    return VolumeTable(exact, floats, h["n_exact"], h["n_float"], prec, x0)

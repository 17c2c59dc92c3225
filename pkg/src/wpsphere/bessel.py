"""Bessel functions J0..J3 by ascending series and the constants built on them."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import mpmath
from mpmath import mp, mpf

DEFAULT_PRECISION = 50
MAX_PRECISION = 2000


class PrecisionError(ValueError):
    pass


def _check_precision(precision: int):
    if not 1 <= precision <= MAX_PRECISION:
        raise PrecisionError(f"precision must lie in [1, {MAX_PRECISION}], got {precision}")


def bessel_j(nu: int, x, precision: int = DEFAULT_PRECISION):
    """J_nu(x) for nu in 0..3 and x >= 0 from the ascending series.

    Summation stops once the term magnitude falls below 10^-(precision+5)
    past the peak; for an alternating series with decreasing terms that
    bounds the truncation error.
    """
    _check_precision(precision)
    if nu not in (0, 1, 2, 3):
        raise ValueError("order must be 0, 1, 2 or 3")
    with mp.workdps(precision + 15):
        x = mpf(x)
        if x < 0:
            raise ValueError("argument must be nonnegative")
        h = x / 2
        term = h**nu / mpmath.factorial(nu)
        total = term
        tol = mpf(10) ** (-(precision + 5))
        h2 = h * h
        m = 0
        while True:
            m += 1
            term = -term * h2 / (m * (m + nu))
            total += term
            if m > h and abs(term) < tol:
                break
        return +total


def first_zero_j0(precision: int = DEFAULT_PRECISION):
    """First positive zero of J0: bisection on [2, 3] to 1e-4, then Newton."""
    _check_precision(precision)
    with mp.workdps(precision + 10):
        lo, hi = mpf(2), mpf(3)
        if not (bessel_j(0, lo, precision) > 0 > bessel_j(0, hi, precision)):
            raise ArithmeticError("J0 does not change sign on [2, 3]")
        while hi - lo > mpf("1e-4"):
            mid = (lo + hi) / 2
            if bessel_j(0, mid, precision) > 0:
                lo = mid
            else:
                hi = mid
        x = (lo + hi) / 2
        tol = mpf(10) ** (-(precision + 3))
        for _ in range(100):
            # J0' = -J1
            step = bessel_j(0, x, precision) / bessel_j(1, x, precision)
            x += step
            if abs(step) < tol:
                break
        return +x


@dataclass(frozen=True)
class BesselConstants:
    j0: mpf
    J1_at_j0: mpf
    J2_at_j0: mpf
    J3_at_j0: mpf
    x0: mpf
    alpha: mpf
    precision: int

    def as_floats(self) -> dict:
        return {k: float(getattr(self, k)) for k in ("j0", "J1_at_j0", "J2_at_j0", "J3_at_j0", "x0", "alpha")}


@lru_cache(maxsize=8)
def bessel_constants(precision: int = DEFAULT_PRECISION) -> BesselConstants:
    j0 = first_zero_j0(precision)
    with mp.workdps(precision + 10):
        J1, J2, J3 = (bessel_j(nu, j0, precision) for nu in (1, 2, 3))
        x0 = j0 * J1 / 2
        alpha = j0**2 / 8 * (1 - J3 / J1)
    return BesselConstants(j0, J1, J2, J3, x0, alpha, precision)


def alpha_closed(precision: int = DEFAULT_PRECISION):
    return bessel_constants(precision).alpha


def alpha_via_phi_prime(precision: int = DEFAULT_PRECISION):
    """Same constant written as phi0'(x0)/x0 with phi0'(x0) = j0^3 (J1 - J3) / 16."""
    c = bessel_constants(precision)
    with mp.workdps(precision + 10):
        return c.j0**3 * (c.J1_at_j0 - c.J3_at_j0) / 16 / c.x0


@dataclass(frozen=True)
class LengthWindow:
    """Length window [a, b] in units of 1/sqrt(n)."""

    a: float
    b: float

    def __post_init__(self):
        if self.a < 0 or self.b < self.a:
            raise ValueError(f"need 0 <= a <= b, got [{self.a}, {self.b}]")

    @property
    def degenerate(self) -> bool:
        return self.a == self.b


def lambda_window(w: LengthWindow, precision: int = DEFAULT_PRECISION):
    """Poisson intensity (b^2 - a^2)/2 * alpha for the window."""
    with mp.workdps(precision + 10):
        return (mpf(w.b) ** 2 - mpf(w.a) ** 2) / 2 * alpha_closed(precision)


def systole_limit_constant(precision: int = DEFAULT_PRECISION):
    c = bessel_constants(precision)
    with mp.workdps(precision + 10):
        return 2 * mpmath.sqrt(mpmath.pi) / (c.j0 * mpmath.sqrt(1 - c.J3_at_j0 / c.J1_at_j0))


def cosh_integral_series(t, precision: int = DEFAULT_PRECISION):
    """int_0^t (cosh s - 1)/s ds = sum_{m>=1} t^(2m) / (2m (2m)!)."""
    with mp.workdps(precision + 10):
        t = mpf(t)
        t2 = t * t
        term = t2 / 2  # t^(2m)/(2m)! at m = 1
        total = mpf(0)
        tol = mpf(10) ** (-(precision + 5))
        m = 1
        while True:
            total += term / (2 * m)
            term = term * t2 / ((2 * m + 1) * (2 * m + 2))
            m += 1
            if term < tol * (1 + total):
                break
        return +total


def mp_intensity(a, b, precision: int = DEFAULT_PRECISION):
    """Closed-surface comparison intensity int_a^b (e^t + e^-t - 2)/(2t) dt."""
    if a < 0 or b < a:
        raise ValueError("need 0 <= a <= b")
    with mp.workdps(precision + 10):
        return cosh_integral_series(b, precision) - cosh_integral_series(a, precision)


def verify_bessel_integral_identity(precision: int = DEFAULT_PRECISION, upper=None) -> dict:
    """Quadrature checks of the integral identities behind the closed form of alpha.

    With ``upper`` (default j0) as the right endpoint this compares
      int_0^u y^3 J0(y) dy  against  u^3 J1(u) - 2 u^2 J2(u),
      int_0^u y J0(y) dy    against  u J1(u),
    and, at u = j0, phi0'(x0) = int_0^{j0^2/4} y J0(2 sqrt y) dy against
    (j0^3/16)(J1 - J3), plus alpha computed both ways.
    """
    c = bessel_constants(precision)
    with mp.workdps(precision + 10):
        u = c.j0 if upper is None else mpf(upper)

        def j0f(y):
            return bessel_j(0, y, precision)

        cubic_q = mpmath.quad(lambda y: y**3 * j0f(y), [0, u])
        cubic_c = u**3 * bessel_j(1, u, precision) - 2 * u**2 * bessel_j(2, u, precision)
        lin_q = mpmath.quad(lambda y: y * j0f(y), [0, u])
        lin_c = u * bessel_j(1, u, precision)
        report = {
            "upper": u,
            "cubic_quadrature": cubic_q,
            "cubic_closed": cubic_c,
            "cubic_residual": abs(cubic_q - cubic_c),
            "linear_quadrature": lin_q,
            "linear_closed": lin_c,
            "linear_residual": abs(lin_q - lin_c),
        }
        if upper is None:
            phi_q = mpmath.quad(lambda y: y * j0f(2 * mpmath.sqrt(y)), [0, c.j0**2 / 4])
            phi_c = c.j0**3 * (c.J1_at_j0 - c.J3_at_j0) / 16
            report.update(
                phi_prime_quadrature=phi_q,
                phi_prime_closed=phi_c,
                phi_prime_residual=abs(phi_q - phi_c),
                alpha_residual=abs(alpha_closed(precision) - alpha_via_phi_prime(precision)),
                recurrence_residual=abs(4 / c.j0 * c.J2_at_j0 - c.J1_at_j0 - c.J3_at_j0),
            )
        return report

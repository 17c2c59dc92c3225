import math
from fractions import Fraction as F

import numpy as np
import pytest
import sympy
from mpmath import mp, mpf

from wpsphere.bessel import bessel_constants
from wpsphere.series import PowerSeries, series_compose, series_integrate
from wpsphere.volumes import (
    B0_from_singularity,
    VolumeTableError,
    build_volume_table,
    estimate_B0,
    exact_volumes_by_recurrence,
    load_table,
    mz_asymptotic,
    neighbor_volume_ratio,
    sandwich_ratio,
    save_table,
    x_of_y_series,
)


def lagrange_volumes(n_max):
    """V_n from [x^m] y = (1/m) [t^(m-1)] (t / x(t))^m, computed with sympy."""
    t = sympy.symbols("t")
    x_of_t = sum(sympy.Rational((-1) ** k, math.factorial(k) * math.factorial(k + 1)) * t ** (k + 1) for k in range(n_max))
    out = {}
    for m in range(1, n_max - 1):
        ser = sympy.series((t / x_of_t) ** m, t, 0, m).removeO()
        coef = sympy.Poly(ser, t).coeff_monomial(t ** (m - 1)) if m > 1 else ser
        out[m + 2] = F(str(sympy.factorial(m - 1) * sympy.nsimplify(coef)))
    return out


def test_x_of_y_coefficients():
    s = x_of_y_series(6)
    assert s[1] == 1
    assert [s[i] for i in range(1, 5)] == [1, F(-1, 2), F(1, 12), F(-1, 144)]
    assert s[6] == F(-1, 86400)


def test_small_volumes(table):
    assert [table.exact[n] for n in (3, 4, 5, 6)] == [1, 1, F(5, 2), F(61, 6)]


def test_against_lagrange_oracle(table):
    oracle = lagrange_volumes(11)
    assert {n: table.exact[n] for n in oracle} == oracle


def test_recurrence_matches_newton_reversion(table):
    rec = exact_volumes_by_recurrence(table.n_exact)
    assert all(rec[n] == table.exact[n] for n in range(3, table.n_exact + 1))


def test_reversion_identity_exact(table):
    order = table.n_exact - 2
    y = PowerSeries.from_list([0] + [table.exact[m + 2] / math.factorial(m) for m in range(1, order + 1)])
    assert series_compose(x_of_y_series(order), y) == PowerSeries.identity(order)


def test_double_integration_reconstructs_volumes(table):
    order = 20
    y = PowerSeries.from_list([0] + [table.exact[m + 2] / math.factorial(m) for m in range(1, order + 1)])
    phi = series_integrate(series_integrate(y))
    for n in range(3, order + 3):
        assert math.factorial(n) * phi[n] == table.exact[n]


def test_exact_float_agreement(table):
    with mp.workdps(80):
        for n in range(3, table.n_exact + 1):
            v = table.exact[n]
            rel = abs(table.floats[n] / (mpf(v.numerator) / v.denominator) - 1)
            assert rel < mpf(10) ** (-table.precision + 5)


def test_float_tier_stable_under_precision():
    hi = build_volume_table(8, 400, 90)
    lo = build_volume_table(8, 400, 60)
    with mp.workdps(100):
        worst = max(abs(hi.floats[n] / lo.floats[n] - 1) for n in range(3, 401))
    assert worst < mpf(10) ** -50


def test_asymptotic_tier_against_float_tier(table):
    asym = table._asymptotic_sigma(150, 401)
    ref = table.sigma_array(400)[150:401]
    assert np.max(np.abs(asym / ref - 1)) < 1e-13


def test_positivity_and_growth(table):
    vals = [table.floats[n] for n in range(3, 401)]
    assert all(v > 0 for v in vals)
    ratios = [vals[i + 1] / vals[i] for i in range(1, len(vals) - 1)]
    assert all(b > a for a, b in zip(ratios, ratios[1:]))


def test_mz_zero():
    assert mz_asymptotic(10, 0) == 0


def test_mz_asymptotic_recovers_table(table):
    b0 = table.B0_estimate.value
    r = table.floats[400] / mz_asymptotic(400, b0)
    # the ratio is s_400 / B0 by definition and sits at 1 + c/(400 B0), c near 1.56
    assert abs(float(r) - table.s_scaled(400) / b0) < 1e-12
    assert 0.015 < r - 1 < 0.025


@pytest.mark.xfail(strict=True, reason="s_n = B0 + c/n with c near 1.56, so n = 60 is still 14% above B0")
def test_mz_ratio_at_60_within_five_percent(table):
    r = table.floats[60] / mz_asymptotic(60, table.B0_estimate.value)
    assert abs(r - 1) < 0.05


@pytest.mark.xfail(strict=True, reason="|s80/s60 - 1| is about 0.032 for this sequence")
def test_s_cauchy_60_80(table):
    s60, s80 = table.s_scaled(60), table.s_scaled(80)
    assert abs(s80 - s60) < 0.01 * s60


def test_s_follows_one_over_n_law(table):
    # s_n - B0 ~ c/n: the product n (s_n - B0) settles
    b0 = B0_from_singularity()
    c = [n * (table.s_scaled(n) - b0) for n in (100, 200, 400)]
    assert all(1.4 < v < 1.7 for v in c)
    assert abs(c[2] - c[1]) < abs(c[1] - c[0])


def test_B0_synthetic_affine():
    s = {n: 7 + 3 / n for n in (40, 60, 80)}
    est = estimate_B0(None, (40, 60, 80), s_values=s)
    assert abs(est.value - 7) < 1e-10


def test_B0_ranges_agree(table):
    a = estimate_B0(table, (20, 40, 60))
    b = estimate_B0(table, (40, 60, 80))
    assert abs(a.value - b.value) <= b.uncertainty
    for pts in [(150, 200, 250), (300, 350, 400)]:
        e = estimate_B0(table, pts)
        assert e.value > 0 and math.isfinite(e.value)
        assert abs(e.value - B0_from_singularity()) <= e.uncertainty


def test_B0_needs_table(table):
    with pytest.raises(VolumeTableError):
        estimate_B0(table, (300, 400, 500))


def test_neighbor_ratio(table):
    assert neighbor_volume_ratio(table, 4) == pytest.approx(0.8, abs=0)
    assert abs(neighbor_volume_ratio(table, 80) - float(bessel_constants().x0)) < 0.05
    assert all(0.3 <= neighbor_volume_ratio(table, n) <= 1.5 for n in range(3, 81))


def test_sandwich():
    assert sandwich_ratio([0, 0, 0]).lo == 1 and sandwich_ratio([0, 0, 0]).hi == 1
    one = sandwich_ratio([1])
    assert one.lo == 1 and one.hi == pytest.approx(math.sinh(1), rel=1e-15) and one.hi >= math.sinh(1)
    assert sandwich_ratio([0.5, 0.5]).hi == pytest.approx((math.sinh(0.5) / 0.5) ** 2, rel=1e-15)
    with pytest.raises(ValueError):
        sandwich_ratio([-0.1])


@pytest.mark.parametrize("bs", [[0.3], [0.1, 0.2, 0.05], [0.01] * 5, [0.7, 0.7]])
def test_sandwich_width_bound(bs):
    iv = sandwich_ratio(bs)
    assert iv.width <= np.prod([1 + b * b for b in bs]) - 1


def test_cache_round_trip(tmp_path):
    t = build_volume_table(12, 40, 30)
    path = tmp_path / "vol.json"
    save_table(t, path)
    back = load_table(path, 12, 40, 30)
    assert back.exact == t.exact
    with mp.workdps(40):
        assert all(abs(back.floats[n] / t.floats[n] - 1) < mpf(10) ** -28 for n in range(13, 41))
    with pytest.raises(VolumeTableError):
        load_table(path, 12, 40, 50)


def test_table_arguments():
    with pytest.raises(VolumeTableError):
        build_volume_table(5, 40)
    with pytest.raises(VolumeTableError):
        build_volume_table(30, 20)

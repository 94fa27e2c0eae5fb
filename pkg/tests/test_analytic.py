import numpy as np
import pytest
from scipy import integrate

from specmi.analytic import (
    AnalyticCase, analytic_displacement, analytic_strain, exact_modes, fourier_coefficients,
    log_cosh, nubar, s_im, sbar, truncated_series,
)
from specmi.grid import UnitCell
from specmi.microstructure import Elastic1D, Interface1D

CELL = UnitCell((1.0,))


def case(eps=0.0, S_I=0.01):
    return AnalyticCase(CELL, Interface1D(0.25, 0.75, eps), Elastic1D(1.0, S_I), 1.0)


def test_sbar_examples():
    assert sbar(case(S_I=1.0)) == pytest.approx(1.0)
    assert sbar(case()) == pytest.approx(0.505)
    assert sbar(case(eps=0.01)) == pytest.approx(0.505, abs=1e-6)


def test_s_im_follows_definition():
    # (S_I - S_M) / Sbar, not the -99/100 quoted with the figure
    assert s_im(case()) == pytest.approx(-0.99 / 0.505)


def test_strain_examples():
    assert analytic_strain(case(), 0.5) == pytest.approx(-0.980198, abs=1e-6)
    assert analytic_strain(case(), 0.05) == pytest.approx(0.980198, abs=1e-6)
    assert analytic_strain(case(S_I=1.0), 0.3) == 0.0


def test_strain_integrates_to_zero():
    for eps in (0.0, 0.01):
        c = case(eps)
        avg, _ = integrate.quad(lambda x: analytic_strain(c, x), 0, 1, points=[0.25, 0.75],
                                epsabs=1e-13, limit=200)
        assert abs(avg) < 1e-10


def test_displacement_boundary_values():
    for eps in (0.0, 0.01, 0.05):
        c = case(eps)
        assert analytic_displacement(c, 0.0) == 0.0
        assert abs(analytic_displacement(c, 1.0)) < 1e-14


def test_displacement_derivative_is_strain():
    for eps in (0.0, 0.02):
        c = case(eps)
        x = np.array([0.1, 0.4, 0.6, 0.9, 0.3])
        errs = []
        for d in (1e-3, 5e-4):
            fd = (analytic_displacement(c, x + d) - analytic_displacement(c, x - d)) / (2 * d)
            errs.append(np.max(np.abs(fd - analytic_strain(c, x))))
        assert errs[1] < 1e-5
        assert errs[1] <= errs[0] / 3 or errs[1] < 1e-9


def test_log_cosh_overflow_safe():
    y = np.array([0.0, 1.0, 800.0, -800.0])
    np.testing.assert_allclose(log_cosh(y[:2]), np.log(np.cosh(y[:2])))
    assert np.isfinite(log_cosh(y)).all()
    assert log_cosh(800.0) == pytest.approx(800.0 - np.log(2.0))


def test_nubar_sharp():
    assert nubar(case()) == pytest.approx(0.5)


def test_truncated_series_examples():
    x = np.linspace(0, 1, 7)
    np.testing.assert_allclose(truncated_series([2.5], x), 2.5)
    np.testing.assert_allclose(truncated_series([0.5, 0, 0.5], x).real, np.cos(2 * np.pi * x),
                               atol=1e-15)


def test_exact_modes_zero_mean_and_cosine():
    modes = exact_modes(case(), 5)
    assert abs(modes[5]) < 1e-12
    cos_modes = fourier_coefficients(lambda x: np.cos(2 * np.pi * x), 1.0, 3)
    expect = np.zeros(7)
    expect[2] = expect[4] = 0.5
    np.testing.assert_allclose(cos_modes, expect, atol=1e-12)


def test_sharp_modes_decay_like_inverse_kappa():
    modes = exact_modes(case(), 41)
    kap = np.arange(1, 42, 2)  # even modes vanish for this symmetric geometry
    amp = np.abs(modes[41 + kap])
    slope = np.polyfit(np.log(kap), np.log(amp), 1)[0]
    assert slope == pytest.approx(-1.0, abs=0.1)


def test_series_tends_to_midpoint_at_jump():
    c = case()
    left, right = analytic_strain(c, 0.25 - 1e-9), analytic_strain(c, 0.25 + 1e-9)
    jump = abs(right - left)
    vals = [abs(truncated_series(exact_modes(c, m), 0.25).real - 0.5 * (left + right))
            for m in (5, 15, 25)]
    assert vals[-1] < 0.02 * jump


def test_smooth_series_error_decreases():
    c = case(0.01)
    x = np.linspace(0, 1, 401)
    errs = [np.max(np.abs(truncated_series(exact_modes(c, m), x).real - analytic_strain(c, x)))
            for m in (5, 15, 25)]
    assert errs[0] > errs[1] > errs[2]

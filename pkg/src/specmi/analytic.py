"""Closed-form 1D matrix-inclusion solution and truncated Fourier series.

The fluctuation strain is ``E~(x) = s_IM (nu(x) - nubar) Ebar`` with
``s_IM = (S_I - S_M) / Sbar``, and the periodic displacement follows from
the antiderivative ``ell(x; c) = x/2 + (eps/2) log cosh((x - c)/eps)`` of
the phase profile.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import InvalidInputError, NumericFailure
from .grid import UnitCell
from .microstructure import Elastic1D, Interface1D, inclusion_density


@dataclass(frozen=True)
class AnalyticCase:
    cell: UnitCell
    iface: Interface1D
    el: Elastic1D
    Ebar: float = 1.0

    def __post_init__(self):
        if self.cell.dim != 1:
            raise InvalidInputError("analytic solution is 1D only")
        if not np.isfinite(self.Ebar):
            raise InvalidInputError("mean strain must be finite")
        self.iface.check_cell(self.length)

    @property
    def length(self) -> float:
        return self.cell.lengths[0]


def log_cosh(y):
    """Overflow-safe ``log(cosh(y))``."""
    a = np.abs(np.asarray(y, dtype=float))
    return a + np.log1p(np.exp(-2 * a)) - np.log(2.0)


def ell(x, c: float, epsilon: float):
    """Antiderivative of the phase profile centered at ``c``."""
    x = np.asarray(x, dtype=float)
    if epsilon == 0:
        return 0.5 * (x + np.abs(x - c))
    return 0.5 * x + 0.5 * epsilon * log_cosh((x - c) / epsilon)


def _lam(x, case: AnalyticCase):
    i = case.iface
    return (ell(x, i.c_left, i.epsilon) - ell(x, i.c_right, i.epsilon)) / case.length


def nubar(case: AnalyticCase) -> float:
    """Cell mean of the inclusion density, ``lambda(l) - lambda(0)``."""
    return float(_lam(case.length, case) - _lam(0.0, case))


def sbar(case: AnalyticCase) -> float:
    """Cell-mean compliance."""
    return case.el.S_M + case.el.S_IM * nubar(case)


def s_im(case: AnalyticCase) -> float:
    return case.el.S_IM / sbar(case)


def analytic_strain(case: AnalyticCase, x):
    """Fluctuation strain; on a sharp interface the step value 1/2 is used."""
    nu = inclusion_density(x, case.iface)
    out = s_im(case) * (np.asarray(nu) - nubar(case)) * case.Ebar
    return out if np.ndim(out) else float(out)


def analytic_stress(case: AnalyticCase) -> float:
    """Uniform stress ``Ebar / Sbar``."""
    return case.Ebar / sbar(case)


def analytic_displacement(case: AnalyticCase, x):
    """Periodic displacement with ``u(0) = 0``."""
    x = np.asarray(x, dtype=float)
    l = case.length
    out = s_im(case) * (_lam(x, case) - _lam(0.0, case) - nubar(case) * x / l) * case.Ebar * l
    return out if out.ndim else float(out)


def truncated_series(modes, x, length: float = 1.0):
    """``sum_{kappa=-m}^{m} exp(i k_kappa x) f_kappa`` for ``modes`` of length ``2m+1``."""
    modes = np.asarray(modes, dtype=complex)
    if modes.ndim != 1 or modes.size % 2 != 1:
        raise InvalidInputError("modes must be a 1D array of odd length 2m+1")
    m = modes.size // 2
    kap = np.arange(-m, m + 1)
    x = np.asarray(x, dtype=float)
    phase = np.exp(2j * np.pi * np.multiply.outer(x, kap) / length)
    out = phase @ modes
    return out if out.ndim else complex(out)


def fourier_coefficients(func, length: float, m: int, breaks=(), tol: float = 1e-12):
    """Mode integrals ``(1/l) int_0^l exp(-i k x) f(x) dx`` for ``|kappa| <= m``.

    The interval is split at ``breaks`` and each piece is integrated with
    QUADPACK's oscillatory weights.
    """
    if m < 1:
        raise InvalidInputError(f"m must be >= 1, got {m}")
    pts = sorted({0.0, float(length), *[float(b) for b in breaks if 0 < b < length]})
    out = np.zeros(2 * m + 1, dtype=complex)
    for idx, kap in enumerate(range(-m, m + 1)):
        w = 2 * np.pi * kap / length
        re = im = 0.0
        for a, b in zip(pts[:-1], pts[1:]):
            with warnings.catch_warnings():
                warnings.simplefilter("error", integrate.IntegrationWarning)
                try:
                    if kap == 0:
                        r, _ = integrate.quad(func, a, b, epsabs=tol, epsrel=0, limit=500)
                        s = 0.0
                    else:
                        r, _ = integrate.quad(func, a, b, weight="cos", wvar=w,
                                              epsabs=tol, epsrel=0, limit=500)
                        s, _ = integrate.quad(func, a, b, weight="sin", wvar=w,
                                              epsabs=tol, epsrel=0, limit=500)
                except integrate.IntegrationWarning as exc:
                    raise NumericFailure(f"mode {kap}: quadrature did not converge ({exc})") from None
            re += r
            im -= s
        out[idx] = (re + 1j * im) / length
    return out


def exact_modes(case: AnalyticCase, m: int, which: str = "strain"):
    """Fourier coefficients of the analytic strain or displacement, ``|kappa| <= m``."""
    if which == "strain":
        f = lambda x: analytic_strain(case, x)  # noqa: E731
    elif which == "displacement":
        f = lambda x: analytic_displacement(case, x)  # noqa: E731
    else:
        raise InvalidInputError(f"which must be strain or displacement, got {which!r}")
    i = case.iface
    return fourier_coefficients(f, case.length, m, (i.c_left, i.c_right))


def series_on_grid(case: AnalyticCase, m: int, x, which: str = "strain"):
    """Real part of the truncated series of the analytic field at ``x``."""
    return np.real(truncated_series(exact_modes(case, m, which), x, case.length))

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from specmi.errors import InvalidInputError
from specmi.grid import Grid
from specmi.wavenumbers import (
    SchemePair, qeff_1d, qeff_3d, resolve_pair, wavenumber_field,
)


def test_1d_examples():
    assert qeff_1d("FD", 3, 4, 0.25) == pytest.approx(0.0)
    assert qeff_1d("CD", 1, 4, 0.25) == 0  # Nyquist null mode
    assert qeff_1d("FD", 1, 4, 0.25) == pytest.approx(-8.0)
    assert qeff_1d("BD", 1, 4, 0.25) == pytest.approx(8.0)
    assert qeff_1d("hC", 1, 4, 0.25) == pytest.approx(-8j)
    assert qeff_1d("F", 4, 4, 0.25) == pytest.approx(2j * np.pi)
    with pytest.raises(InvalidInputError):
        qeff_1d("AFD", 1, 4, 0.25)
    with pytest.raises(InvalidInputError):
        qeff_1d("FD", 0, 4, 0.25)


@pytest.mark.parametrize("scheme, shift", [("FD", (1, 0)), ("BD", (0, -1)), ("CD", (1, -1))])
def test_1d_stencils_on_plane_waves(scheme, shift):
    n, h = 7, 1 / 7
    x = np.arange(n) * h
    for mu in range(1, n + 1):
        q = 2j * np.pi * (mu - 1 - n // 2)
        u = np.exp(q * x)
        up, dn = np.roll(u, -shift[0]), np.roll(u, -shift[1])
        d = (up - dn) / (h * (shift[0] - shift[1]))
        if scheme == "CD":
            d = (up - dn) / (2 * h)
        np.testing.assert_allclose(d, qeff_1d(scheme, mu, n, h) * u, atol=1e-11)


def test_hc_is_half_step_central():
    n, h = 6, 1 / 6
    for mu in range(1, n + 1):
        q = 2j * np.pi * (mu - 1 - n // 2)
        x = 0.3
        d = (np.exp(q * (x + h / 2)) - np.exp(q * (x - h / 2))) / h
        assert d == pytest.approx(qeff_1d("hC", mu, n, h) * np.exp(q * x), abs=1e-11)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 64), st.floats(0.1, 10))
def test_1d_identities(n, length):
    h = length / n
    mu = np.arange(1, n + 1)
    fd, bd = qeff_1d("FD", mu, n, h), qeff_1d("BD", mu, n, h)
    cd, hc = qeff_1d("CD", mu, n, h), qeff_1d("hC", mu, n, h)
    tol = 1e-11 / h ** 2
    np.testing.assert_allclose(bd, -np.conj(fd), atol=tol * h)
    np.testing.assert_allclose(cd, (fd + bd) / 2, atol=tol * h)
    np.testing.assert_allclose(fd * bd, hc * hc, atol=tol)
    np.testing.assert_allclose(np.abs(fd) ** 2, np.abs(hc) ** 2, atol=tol)


def _shifted_mean(u, q, h, x, shifts):
    return np.mean([u(x + d) for d in shifts], axis=0)


@pytest.mark.parametrize("scheme", ["AFD", "ABD", "ACD", "AhC"])
def test_3d_stencils_on_plane_waves(scheme):
    n, h = (5, 4, 6), (0.2, 0.3, 0.25)
    L = np.array(n) * h
    deriv = {"AFD": (1.0, 0.0), "ABD": (0.0, -1.0), "ACD": (1.0, -1.0), "AhC": (0.5, -0.5)}[scheme]
    trans = {"AFD": (0.0, 1.0), "ABD": (0.0, -1.0), "ACD": (1.0, -1.0), "AhC": (0.5, -0.5)}[scheme]
    x0 = np.array([0.11, 0.07, 0.19])
    rng = np.random.default_rng(0)
    for _ in range(20):
        mu = [rng.integers(1, n[a] + 1) for a in range(3)]
        q = np.array([2j * np.pi * (mu[a] - 1 - n[a] // 2) / L[a] for a in range(3)])
        u = lambda y: np.exp(q @ y)  # noqa: E731
        for r, (s, t) in enumerate(((1, 2), (2, 0), (0, 1))):
            e = np.eye(3)
            val = 0
            for ts in trans:
                for tt in trans:
                    base = x0 + ts * h[s] * e[s] + tt * h[t] * e[t]
                    val += (u(base + deriv[0] * h[r] * e[r]) - u(base + deriv[1] * h[r] * e[r]))
            val /= 4 * h[r] * (deriv[0] - deriv[1])
            expect = qeff_3d(scheme, mu, n, h, r) * u(x0)
            assert val == pytest.approx(expect, abs=1e-10)


def test_3d_example_values():
    assert qeff_3d("AFD", (1, 1, 1), (4, 4, 4), (0.25,) * 3, 0) == pytest.approx(0.0)
    assert qeff_3d("ACD", (2, 3, 3), (4, 4, 4), (0.25,) * 3, 0) == pytest.approx(-4j)
    assert qeff_3d("F", (3, 3, 3), (4, 4, 4), (0.25,) * 3, 2) == 0
    with pytest.raises(InvalidInputError):
        qeff_3d("AFD", (0, 1, 1), (4, 4, 4), (0.25,) * 3, 0)


def test_r_matches_afd_bitwise():
    for counts in [(4, 4, 4), (5, 6, 7), (21, 21, 21)]:
        g = Grid.regular([float(c) for c in counts], counts)
        assert np.array_equal(wavenumber_field("R", g), wavenumber_field("AFD", g))


def test_strict_r_marks_indeterminate_mode():
    g = Grid.regular([1.0] * 3, [4, 4, 4])
    table = resolve_pair(SchemePair("R", "conjugate"), g, strict=True)
    assert table.indeterminate.any()
    assert np.all(table.qa[:, table.indeterminate] == 0)
    odd = Grid.regular([1.0] * 3, [5, 5, 5])
    assert not resolve_pair(SchemePair("R", "conjugate"), odd, strict=True).indeterminate.any()


def test_pair_rules():
    g = Grid.regular(1.0, 8)
    t = resolve_pair(SchemePair.parse("FD", "afbr"), g)
    np.testing.assert_array_equal(t.qb, wavenumber_field("hC", g))
    t = resolve_pair(SchemePair.parse("CD", "conjugate"), g)
    np.testing.assert_array_equal(t.qb, np.conj(t.qa))
    t = resolve_pair(SchemePair.parse("FD", "explicit:BD"), g)
    np.testing.assert_allclose(t.qb, wavenumber_field("BD", g))
    with pytest.raises(InvalidInputError):
        SchemePair.parse("CD", "afbr").validate(1)
    with pytest.raises(InvalidInputError):
        SchemePair.parse("FD", "sideways")


def test_natural_order_is_shift_of_mu_order():
    g = Grid.regular([1.0] * 3, [4, 5, 6])
    a = wavenumber_field("ACD", g)
    b = wavenumber_field("ACD", g, natural=True)
    np.testing.assert_array_equal(np.fft.fftshift(b, axes=(1, 2, 3)), a)

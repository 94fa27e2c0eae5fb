import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from specmi.errors import InvalidInputError, NumericFailure
from specmi.green import (
    Medium1D, Medium3D, apply_sym6, continuum_green_hat, dgo_brute_force, dgo_table, gamma_hat,
    green_1d, green_3d, green_inv_3d,
)
from specmi.grid import Grid
from specmi.transforms import sinc

MED = Medium3D(1.3, 0.7)


def _sym(a):
    return 0.5 * (a + a.T)


def test_green_1d_examples():
    assert green_1d(2.0, 1j, -1j) == pytest.approx(-0.5)
    assert green_1d(2.0, 0.0, 1.0) == 0
    np.testing.assert_allclose(green_1d(1.0, np.array([2j, 0]), np.array([-2j, 0])), [-0.25, 0])
    with pytest.raises(InvalidInputError):
        green_1d(0.0, 1j, 1j)


def test_medium_validation():
    with pytest.raises(InvalidInputError):
        Medium1D(-1.0)
    with pytest.raises(InvalidInputError):
        Medium3D(1.0, 0.0)
    assert Medium3D(1.0, 1.0).ratio == pytest.approx(2 / 3)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_green_3d_is_batch_inverse(seed):
    rng = np.random.default_rng(seed)
    qa = rng.normal(size=(3, 5)) + 1j * rng.normal(size=(3, 5))
    qb = np.conj(qa)
    G = green_3d(MED, qa, qb)
    M = green_inv_3d(MED, qa, qb)
    for p in range(5):
        np.testing.assert_allclose(G[:, :, p] @ M[:, :, p], np.eye(3), atol=1e-10)


def test_green_3d_null_and_singular():
    qa = np.zeros((3, 2), dtype=complex)
    qa[:, 1] = [1j, 0, 0]
    G = green_3d(MED, qa, np.conj(qa))
    assert np.all(G[:, :, 0] == 0)
    # q^a . q^b = 1 yet det = (2 + lambda) - lambda t^2 = 0 for t = sqrt(3), lambda = mu = 1
    qa = np.array([[1.0], [0.0], [0.0]])
    qb = np.array([[1.0], [np.sqrt(3.0)], [0.0]])
    with pytest.raises(NumericFailure):
        green_3d(Medium3D(1.0, 1.0), qa, qb)


def test_spectral_pair_recovers_continuum_green():
    k = np.array([1.0, -2.0, 0.5])
    G = green_3d(MED, 1j * k[:, None], -1j * k[:, None])[:, :, 0]
    np.testing.assert_allclose(G, -continuum_green_hat(MED, k), atol=1e-14)


def test_continuum_green_tensor_form():
    k = np.array([0.3, 0.4, 1.2])
    G = continuum_green_hat(MED, k)
    Ginv = MED.mu_H * (k @ k) * np.eye(3) + (MED.lambda_H + MED.mu_H) * np.outer(k, k)
    np.testing.assert_allclose(G @ Ginv, np.eye(3), atol=1e-13)


def test_gamma_hat_closed_form():
    rng = np.random.default_rng(5)
    k = rng.normal(size=3)
    A = _sym(rng.normal(size=(3, 3)))
    kh = k / np.linalg.norm(k)
    kk = np.outer(kh, kh)
    c = MED.ratio
    expect = -(_sym(A @ kk) - c * (kh @ A @ kh) * kk) / MED.mu_H
    np.testing.assert_allclose(gamma_hat(MED, k, A), expect, atol=1e-13)


def test_gamma_hat_inverts_stiffness_on_compatible_strain():
    rng = np.random.default_rng(6)
    k, v = rng.normal(size=3), rng.normal(size=3)
    eps = _sym(np.outer(k, v))
    A = 2 * MED.mu_H * eps + MED.lambda_H * np.trace(eps) * np.eye(3)
    np.testing.assert_allclose(gamma_hat(MED, k, A), -eps, atol=1e-12)


def test_gamma_hat_1d():
    assert gamma_hat(Medium1D(4.0), 1.0, 2.0) == -0.5
    with pytest.raises(InvalidInputError):
        gamma_hat(Medium1D(4.0), 0.0, 2.0)


def test_dgo_1d_table():
    g = Grid.regular(1.0, 6)
    t = dgo_table(Medium1D(2.0), g)
    nu = np.arange(-3, 3)[:, None]
    expect = -sinc(nu * 6 + np.arange(6), 6).sum(axis=0) / 2.0
    expect[0] = 0
    np.testing.assert_allclose(t.data, expect)
    sq = dgo_table(Medium1D(2.0), g, weight="sinc2")
    assert np.all(np.abs(sq.data[1:]) < 0.5)
    with pytest.raises(InvalidInputError):
        dgo_table(Medium1D(2.0), g, weight="box")


@pytest.mark.parametrize("omega", [(1, 0, 0), (2, 3, 1), (0, 1, 2), (3, 3, 3)])
def test_dgo_3d_matches_brute_force(omega):
    g = Grid.regular([1.0, 1.5, 2.0], [4, 5, 4])
    m = (2, 2, 2)
    t = dgo_table(MED, g, m)
    rng = np.random.default_rng(sum(omega))
    A = _sym(rng.normal(size=(3, 3)))
    got = apply_sym6(t.data[(slice(None), slice(None)) + omega], A)
    np.testing.assert_allclose(got, dgo_brute_force(MED, g, m, omega, A), atol=1e-12)


def test_dgo_zero_frequency_and_symmetric_action():
    g = Grid.regular([1.0] * 3, [3, 3, 3])
    t = dgo_table(MED, g, 1)
    assert np.all(t.data[:, :, 0, 0, 0] == 0)
    rng = np.random.default_rng(2)
    A = rng.normal(size=(3, 3))
    om = (1, 2, 0)
    # the table is defined on symmetric arguments; its output is symmetric
    brute = dgo_brute_force(MED, g, (1, 1, 1), om, _sym(A))
    got = apply_sym6(t.data[:, :, 1, 2, 0], _sym(A))
    np.testing.assert_allclose(got, brute, atol=1e-12)
    np.testing.assert_allclose(got, got.T, atol=0)

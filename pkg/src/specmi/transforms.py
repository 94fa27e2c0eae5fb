"""Discrete Fourier transforms for node (TD) and center (PCD) sampling.

Modal arrays returned by the public transforms are in mu-order: position
``mu - 1`` along each axis holds wavenumber index ``kappa = mu - 1 - m``,
which is the ``fftshift`` order.  Both directions carry the symmetric
``n**-1/2`` normalization.  The solvers bypass the reordering and work in
natural FFT order through :func:`fft_nat` / :func:`ifft_nat`.

The DGO transform pair uses frequencies ``omega = 0..n-1`` in natural
order with the half-sample phase of the cell centers.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.fft as sfft

from .errors import InvalidInputError
from .grid import Field, Grid, require_sampling

THREADS_ENV = "SPECMI_THREADS"


def workers() -> int:
    """FFT worker count from the ``SPECMI_THREADS`` environment variable."""
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        value = int(raw)
    except ValueError:
        raise InvalidInputError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if value < 1:
        raise InvalidInputError(f"{THREADS_ENV} must be >= 1, got {value}")
    return value


def kappa(n: int) -> np.ndarray:
    """Wavenumber indices in mu-order: ``kappa = mu - 1 - m``."""
    return np.arange(n) - n // 2


def kappa_natural(n: int) -> np.ndarray:
    """Wavenumber indices in natural FFT order (even n: -n/2 at the Nyquist slot)."""
    return np.rint(sfft.fftfreq(n) * n).astype(int)


def mu_to_kappa(mu, n: int):
    return np.asarray(mu) - 1 - n // 2


def kappa_to_mu(kap, n: int):
    return np.asarray(kap) + 1 + n // 2


def wavenumbers(n: int, length: float, natural: bool = False) -> np.ndarray:
    """``q = i k_kappa = 2 pi i kappa / l`` for every mode of one axis."""
    kap = kappa_natural(n) if natural else kappa(n)
    return 2j * np.pi * kap / length


# -- fast paths ---------------------------------------------------------------

def _axes(ndim_grid: int, ndim_data: int) -> tuple[int, ...]:
    return tuple(range(ndim_data - ndim_grid, ndim_data))


def fft_nat(data, dim: int) -> np.ndarray:
    """Orthonormal forward DFT over the trailing ``dim`` axes, natural order."""
    data = np.asarray(data)
    return sfft.fftn(data, axes=_axes(dim, data.ndim), norm="ortho", workers=workers())


def ifft_nat(data, dim: int) -> np.ndarray:
    data = np.asarray(data)
    return sfft.ifftn(data, axes=_axes(dim, data.ndim), norm="ortho", workers=workers())


@lru_cache(maxsize=64)
def _half_phase(n: int, sign: int, natural: bool) -> np.ndarray:
    kap = kappa_natural(n) if natural else kappa(n)
    out = np.exp(sign * 1j * np.pi * kap / n)
    out.flags.writeable = False
    return out


def half_sample_phase(counts, sign: int = -1, natural: bool = False) -> np.ndarray:
    """Product over axes of ``exp(sign * q h / 2)`` broadcast to the mode grid."""
    dim = len(counts)
    out = np.ones(tuple(counts), dtype=complex)
    for r, n in enumerate(counts):
        shape = [1] * dim
        shape[r] = n
        out = out * _half_phase(n, sign, natural).reshape(shape)
    return out


@lru_cache(maxsize=64)
def _dgo_phase(n: int, sign: int) -> np.ndarray:
    out = np.exp(sign * 1j * np.pi * np.arange(n) / n)
    out.flags.writeable = False
    return out


def dgo_phase(counts, sign: int = -1) -> np.ndarray:
    """Product over axes of ``exp(sign * i pi omega / n)``, ``omega = 0..n-1``."""
    dim = len(counts)
    out = np.ones(tuple(counts), dtype=complex)
    for r, n in enumerate(counts):
        shape = [1] * dim
        shape[r] = n
        out = out * _dgo_phase(n, sign).reshape(shape)
    return out


def _shift(data, dim):
    return sfft.fftshift(data, axes=_axes(dim, np.ndim(data)))


def _ishift(data, dim):
    return sfft.ifftshift(data, axes=_axes(dim, np.ndim(data)))


# -- public transforms --------------------------------------------------------

def td_forward(f: Field) -> Field:
    """Node samples to modes: ``n^-1/2 sum_i exp(-q_mu x_i) f_i`` per axis."""
    require_sampling(f, "node")
    d = f.grid.dim
    return f.with_data(_shift(fft_nat(f.data, d), d), "mode")


def td_backward(fm: Field) -> Field:
    """Modes to node samples (exact inverse of :func:`td_forward`)."""
    require_sampling(fm, "mode")
    d = fm.grid.dim
    return fm.with_data(ifft_nat(_ishift(fm.data, d), d), "node")


def pcd_forward(f: Field) -> Field:
    """Center samples to modes: ``n^-1/2 sum_i exp(-q_mu x_i^c) f_i``."""
    require_sampling(f, "center")
    d = f.grid.dim
    phase = half_sample_phase(f.grid.counts, -1)
    return f.with_data(phase * _shift(fft_nat(f.data, d), d), "mode")


def pcd_backward(fm: Field) -> Field:
    require_sampling(fm, "mode")
    d = fm.grid.dim
    phase = half_sample_phase(fm.grid.counts, +1)
    return fm.with_data(ifft_nat(_ishift(phase * fm.data, d), d), "center")


def dgo_forward(f: Field) -> Field:
    """Center samples to ``omega = 0..n-1`` modes with phase ``exp(-i k_omega x^c)``."""
    require_sampling(f, "center")
    d = f.grid.dim
    return f.with_data(dgo_phase(f.grid.counts, -1) * fft_nat(f.data, d), "mode")


def dgo_backward(fm: Field) -> Field:
    require_sampling(fm, "mode")
    d = fm.grid.dim
    return fm.with_data(ifft_nat(dgo_phase(fm.grid.counts, +1) * fm.data, d), "center")


# -- dense oracles -------------------------------------------------------------

def dense_matrix(n: int, length: float, sign: int, sampling: str = "node") -> np.ndarray:
    """``F^{+-}_{mu i} = n^-1/2 exp(+-q_mu x_i)`` as an (n, n) array (test oracle)."""
    grid = Grid.regular(length, n)
    x = grid.coords(sampling)
    q = wavenumbers(n, length)
    return np.exp(sign * np.outer(q, x)) / np.sqrt(n)


def dense_forward(f: np.ndarray, grid: Grid, sampling: str) -> np.ndarray:
    """Apply the dense forward matrices axis by axis (tensor-product form)."""
    out = np.asarray(f, dtype=complex)
    for r in range(grid.dim):
        F = dense_matrix(grid.counts[r], grid.lengths[r], -1, sampling)
        out = np.moveaxis(np.tensordot(F, out, axes=([1], [r])), 0, r)
    return out


def dense_backward(fm: np.ndarray, grid: Grid, sampling: str) -> np.ndarray:
    out = np.asarray(fm, dtype=complex)
    for r in range(grid.dim):
        F = dense_matrix(grid.counts[r], grid.lengths[r], +1, sampling)
        out = np.moveaxis(np.tensordot(F.T, out, axes=([1], [r])), 0, r)
    return out


# -- sinc filter and Eloh interpolant ---------------------------------------------

def sinc(kap, n: int):
    """Unnormalized ``sin(x)/x`` at ``x = pi kappa / n``."""
    return np.sinc(np.asarray(kap, dtype=float) / n)


@dataclass(frozen=True)
class SincFilter:
    n: int

    def __post_init__(self):
        if self.n < 2:
            raise InvalidInputError(f"sinc filter needs n >= 2, got {self.n}")

    def __call__(self, kap):
        return sinc(kap, self.n)

    @property
    def values(self) -> np.ndarray:
        """``s_mu^c`` in mu-order."""
        return sinc(kappa(self.n), self.n)


def sinc_filter(n: int) -> SincFilter:
    return SincFilter(int(n))


def eloh_basis(n: int, length: float, m_trunc: int, x) -> np.ndarray:
    """``phi_omega^El(x)`` for ``omega = 0..n-1``; shape ``(n, *x.shape)``."""
    if m_trunc < 1:
        raise InvalidInputError(f"m_trunc must be >= 1, got {m_trunc}")
    if (n * m_trunc) % 2:
        raise InvalidInputError(f"Eloh interpolant needs n*m even, got n={n}, m={m_trunc}")
    x = np.asarray(x, dtype=float)
    omega = np.arange(n).reshape((n,) + (1,) * x.ndim)
    out = np.zeros((n,) + x.shape, dtype=complex)
    for nu in range(-m_trunc, m_trunc):
        j = nu * n + omega
        out += np.exp(2j * np.pi * j * x / length) * (-1.0) ** nu * sinc(j, n)
    return out / np.sqrt(n)


def eloh_interpolate(fm: Field, m_trunc: int, x):
    """Evaluate ``f_El(x) = sum_omega phi_omega^El(x) f_omega^c`` on a 1D grid."""
    require_sampling(fm, "mode")
    if fm.grid.dim != 1 or fm.rank != "scalar":
        raise InvalidInputError("eloh_interpolate works on 1D scalar mode fields")
    basis = eloh_basis(fm.grid.counts[0], fm.grid.lengths[0], m_trunc, x)
    return np.tensordot(fm.data, basis, axes=([0], [0]))

"""Green-function preconditioners and the discrete Green operator (DGO).

Symmetric second-order tensors use the 6-component storage of
:mod:`specmi.grid`.  A DGO table stores, for every frequency, the real
6x6 matrix mapping the stored components of ``A`` to those of
``Gamma[A]``; it acts on the symmetric part of its argument.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, NumericFailure
from .grid import Grid, SYM_ORDER, matrix_to_sym, sym_to_matrix
from .transforms import sinc


@dataclass(frozen=True)
class Medium1D:
    C_H: float

    def __post_init__(self):
        if not self.C_H > 0:
            raise InvalidInputError(f"reference stiffness must be positive, got {self.C_H}")


@dataclass(frozen=True)
class Medium3D:
    lambda_H: float
    mu_H: float

    def __post_init__(self):
        if not self.mu_H > 0 or self.lambda_H < 0:
            raise InvalidInputError("reference medium needs mu_H > 0 and lambda_H >= 0")

    @property
    def ratio(self) -> float:
        """``(1 + lambda/mu) / (1 + (1 + lambda/mu))``, i.e. ``(lambda+mu)/(lambda+2mu)``."""
        a = 1.0 + self.lambda_H / self.mu_H
        return a / (1.0 + a)


# -- displacement-based preconditioners -------------------------------------------

def green_1d(C_H: float, qa, qb):
    """``-1 / (C_H qa qb)``, zero where ``qa qb = 0``."""
    if not C_H > 0:
        raise InvalidInputError(f"C_H must be positive, got {C_H}")
    prod = np.asarray(qa, dtype=complex) * np.asarray(qb, dtype=complex)
    null = prod == 0
    out = np.where(null, 0.0, -1.0 / (C_H * np.where(null, 1.0, prod)))
    return out if out.ndim else complex(out)


def green_inv_3d(medium: Medium3D, qa, qb) -> np.ndarray:
    """``-mu (qa.qb) I - mu qa(x)qb - lambda qb(x)qa``; vectors on the leading axis."""
    qa = np.asarray(qa, dtype=complex)
    qb = np.asarray(qb, dtype=complex)
    dot = np.sum(qa * qb, axis=0)
    eye = np.eye(3).reshape((3, 3) + (1,) * (qa.ndim - 1))
    return (-medium.mu_H * dot * eye
            - medium.mu_H * qa[:, None] * qb[None, :]
            - medium.lambda_H * qb[:, None] * qa[None, :])


def green_3d(medium: Medium3D, qa, qb, null=None) -> np.ndarray:
    """Per-mode inverse of :func:`green_inv_3d`; null modes give zero.

    ``qa``/``qb`` have shape ``(3, ...)``; the result has shape ``(3, 3, ...)``.
    A mode is null when ``qa . qb = 0`` or when flagged in ``null``.
    """
    qa = np.asarray(qa, dtype=complex)
    qb = np.asarray(qb, dtype=complex)
    batch = qa.shape[1:]
    M = green_inv_3d(medium, qa, qb).reshape(3, 3, -1).transpose(2, 0, 1)
    is_null = (np.sum(qa * qb, axis=0) == 0).reshape(-1)
    if null is not None:
        is_null = is_null | np.broadcast_to(null, batch).reshape(-1)
    M[is_null] = np.eye(3)
    det = np.linalg.det(M)
    scale = np.max(np.abs(M), axis=(1, 2)) ** 3
    singular = ~is_null & (np.abs(det) <= 1e-13 * scale)
    if singular.any():
        idx = np.unravel_index(int(np.flatnonzero(singular)[0]), batch) if batch else ()
        raise NumericFailure(f"singular preconditioner at non-null mode {tuple(int(i) for i in idx)}")
    G = np.linalg.inv(M)
    G[is_null] = 0.0
    return G.transpose(1, 2, 0).reshape((3, 3) + batch)


# -- continuum operators ------------------------------------------------------------

def continuum_green_hat(medium: Medium3D, k) -> np.ndarray:
    """Fourier transform of the isotropic Green tensor at a real wavevector ``k``."""
    k = np.asarray(k, dtype=float)
    k2 = float(k @ k)
    if k2 == 0:
        raise InvalidInputError("continuum Green tensor undefined at k = 0")
    khat = k / np.sqrt(k2)
    return (np.eye(3) - medium.ratio * np.outer(khat, khat)) / (medium.mu_H * k2)


def gamma_hat(medium, k, A):
    """Lippmann-Schwinger operator ``-sym[G(k) A (k (x) k)]`` applied to ``A``.

    In 1D (``medium`` a :class:`Medium1D`) this is ``-A / C_H``.
    """
    if isinstance(medium, Medium1D):
        if np.all(np.asarray(k) == 0):
            raise InvalidInputError("Lippmann-Schwinger operator undefined at k = 0")
        return -np.asarray(A) / medium.C_H
    k = np.asarray(k, dtype=float)
    G = continuum_green_hat(medium, k)
    B = G @ np.asarray(A) @ np.outer(k, k)
    return -0.5 * (B + B.T)


# -- discrete Green operator -----------------------------------------------------------

# index lists for the moment tensors
_PAIRS = [(i, j) for i in range(3) for j in range(i, 3)]
_QUADS = [(i, j, k, l) for i in range(3) for j in range(i, 3)
          for k in range(j, 3) for l in range(k, 3)]
_PAIR_POS = {p: c for c, p in enumerate(_PAIRS)}
_QUAD_POS = {q: c for c, q in enumerate(_QUADS)}


def _m2(M2, i, j):
    return M2[_PAIR_POS[tuple(sorted((i, j)))]]


def _m4(M4, i, j, k, l):
    return M4[_QUAD_POS[tuple(sorted((i, j, k, l)))]]


@dataclass(frozen=True)
class DgoTable:
    """Per-frequency operator; 1D: scalar per omega, 3D: (6, 6, *counts) real."""

    grid: Grid
    m_trunc: tuple[int, ...]
    data: np.ndarray
    weight: str = "sinc"

    def apply(self, T: np.ndarray) -> np.ndarray:
        """Apply to modal data (1D: ``(n,)``; 3D: ``(6, *counts)``)."""
        if self.grid.dim == 1:
            return self.data * T
        return np.einsum("ab...,b...->a...", self.data, T)


DGO_WEIGHTS = {"sinc": 1, "sinc2": 2}


def _moment_sums(grid: Grid, m_trunc, power: int = 1):
    """Weighted moments of ``khat`` over the aliased lattice, for every omega."""
    n = grid.counts
    L = grid.lengths
    omega = [np.arange(n[r]) for r in range(3)]
    shape = tuple(n)
    M2 = np.zeros((6,) + shape)
    M4 = np.zeros((15,) + shape)
    W = np.zeros(shape)
    nus = [np.arange(-m_trunc[r], m_trunc[r]) for r in range(3)]
    # along axis 2 the nu loop is vectorized as an extra trailing dimension
    j3 = nus[2][None, :] * n[2] + omega[2][:, None]          # (n3, 2m3)
    k3 = 2 * np.pi * j3 / L[2]
    s3 = sinc(j3, n[2]) ** power
    for nu1 in nus[0]:
        j1 = nu1 * n[0] + omega[0]
        k1 = (2 * np.pi * j1 / L[0])[:, None, None, None]
        s1 = sinc(j1, n[0])[:, None, None, None] ** power
        for nu2 in nus[1]:
            j2 = nu2 * n[1] + omega[1]
            k2 = (2 * np.pi * j2 / L[1])[None, :, None, None]
            s2 = sinc(j2, n[1])[None, :, None, None] ** power
            kk = np.broadcast_arrays(k1, k2, k3[None, None])
            kk2 = kk[0] ** 2 + kk[1] ** 2 + kk[2] ** 2
            zero = kk2 == 0
            inv = 1.0 / np.sqrt(np.where(zero, 1.0, kk2))
            kh = [np.where(zero, 0.0, c * inv) for c in kk]
            w = np.where(zero, 0.0, s1 * s2 * s3[None, None])
            W += w.sum(axis=-1)
            for c, (i, j) in enumerate(_PAIRS):
                M2[c] += (w * kh[i] * kh[j]).sum(axis=-1)
            for c, (i, j, k, l) in enumerate(_QUADS):
                M4[c] += (w * kh[i] * kh[j] * kh[k] * kh[l]).sum(axis=-1)
    return W, M2, M4


def _gamma_matrix(medium: Medium3D, M2, M4) -> np.ndarray:
    """6x6 matrix of ``A -> -(1/mu)[sym(A M2) - c M4:A]`` in sym storage."""
    c = medium.ratio
    shape = M2.shape[1:]
    out = np.zeros((6, 6) + shape)
    for b, (p, q) in enumerate(SYM_ORDER):
        # unit symmetric tensor for component b
        A = np.zeros((3, 3))
        A[p, q] = 1.0
        A[q, p] = 1.0
        if p == q:
            A[p, p] = 1.0
        for a, (i, j) in enumerate(SYM_ORDER):
            # sym(A M2)_{ij} = 1/2 (A_ik M2_kj + A_jk M2_ki)
            val = np.zeros(shape)
            for k in range(3):
                if A[i, k]:
                    val = val + 0.5 * A[i, k] * _m2(M2, k, j)
                if A[j, k]:
                    val = val + 0.5 * A[j, k] * _m2(M2, k, i)
            for k in range(3):
                for l in range(3):
                    if A[k, l]:
                        val = val - c * A[k, l] * _m4(M4, i, j, k, l)
            out[a, b] = -val / medium.mu_H
    return out


def dgo_table(medium, grid: Grid, m_trunc=None, weight: str = "sinc") -> DgoTable:
    """Sinc-weighted aliased sum of the Lippmann-Schwinger operator.

    ``Gamma_omega = sum_{nu=-m}^{m-1} s_{nu n + omega} Gamma_hat(k_{nu n + omega})``
    per axis, with ``Gamma_0 = 0``.  ``m_trunc`` defaults to ``n // 2``.
    ``weight="sinc2"`` squares the sinc factors (an opt-in variant whose
    truncated weight sums stay below one).
    """
    if weight not in DGO_WEIGHTS:
        raise InvalidInputError(f"DGO weight must be one of {tuple(DGO_WEIGHTS)}, got {weight!r}")
    power = DGO_WEIGHTS[weight]
    if m_trunc is None:
        m_trunc = grid.half_counts
    m_trunc = tuple(int(v) for v in np.atleast_1d(m_trunc))
    if len(m_trunc) == 1 and grid.dim == 3:
        m_trunc = m_trunc * 3
    if len(m_trunc) != grid.dim or any(v < 1 for v in m_trunc):
        raise InvalidInputError(f"m_trunc must be >= 1 per axis, got {m_trunc}")
    if grid.dim == 1:
        if not isinstance(medium, Medium1D):
            raise InvalidInputError("1D DGO needs a Medium1D")
        n = grid.counts[0]
        omega = np.arange(n)
        nu = np.arange(-m_trunc[0], m_trunc[0])[:, None]
        gamma = (sinc(nu * n + omega[None, :], n) ** power).sum(axis=0)
        data = -gamma / medium.C_H
        data[0] = 0.0
        return DgoTable(grid, m_trunc, data, weight)
    if not isinstance(medium, Medium3D):
        raise InvalidInputError("3D DGO needs a Medium3D")
    _, M2, M4 = _moment_sums(grid, m_trunc, power)
    data = _gamma_matrix(medium, M2, M4)
    data[(slice(None), slice(None), 0, 0, 0)] = 0.0
    return DgoTable(grid, m_trunc, data, weight)


def dgo_brute_force(medium: Medium3D, grid: Grid, m_trunc, omega, A) -> np.ndarray:
    """Direct triple sum for one frequency applied to a 3x3 tensor (test oracle)."""
    n, L = grid.counts, grid.lengths
    if all(w == 0 for w in omega):
        return np.zeros((3, 3))
    out = np.zeros((3, 3))
    rng = [range(-m, m) for m in m_trunc]
    for a in rng[0]:
        for b in rng[1]:
            for c in rng[2]:
                j = np.array([a * n[0] + omega[0], b * n[1] + omega[1], c * n[2] + omega[2]])
                if not j.any():
                    continue
                w = sinc(j[0], n[0]) * sinc(j[1], n[1]) * sinc(j[2], n[2])
                k = 2 * np.pi * j / np.asarray(L)
                out += w * gamma_hat(medium, k, A)
    return out


def apply_sym6(matrix6: np.ndarray, A: np.ndarray) -> np.ndarray:
    """Apply a (6, 6) sym-storage operator to a full 3x3 tensor; returns 3x3."""
    return sym_to_matrix(matrix6 @ matrix_to_sym(A))

"""Effective wavenumbers of the finite-difference gradient/divergence schemes.

Each scheme is represented by the complex factor it produces when applied
to a plane wave ``exp(q x)`` with ``q = i k``.  Values whose real or
imaginary part is round-off small (relative to ``1/h``) are snapped to an
exact zero so that null sets such as ``sinh(-i pi) = 0`` are exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .grid import Grid
from .transforms import kappa, kappa_natural

SCHEMES_1D = ("F", "FD", "BD", "CD", "hC")
SCHEMES_3D_ONLY = ("AFD", "ABD", "ACD", "AhC", "R")
SCHEMES_3D = SCHEMES_1D + SCHEMES_3D_ONLY
PAIR_RULES = ("conjugate", "afbr")

_SNAP = 1e-13
# cyclic transverse axes (s, t) for r = 0, 1, 2
_TRANSVERSE = ((1, 2), (2, 0), (0, 1))


def _snap(z, scale: float = 1.0):
    z = np.asarray(z, dtype=complex)
    re = np.where(np.abs(z.real) < _SNAP * scale, 0.0, z.real)
    im = np.where(np.abs(z.imag) < _SNAP * scale, 0.0, z.imag)
    return re + 1j * im


def check_scheme(scheme: str, dim: int) -> None:
    allowed = SCHEMES_1D if dim == 1 else SCHEMES_3D
    if scheme not in allowed:
        raise InvalidInputError(
            f"scheme {scheme!r} is not available in {dim}D (choose from {', '.join(allowed)})")


def _base(scheme: str, q, h: float, strict: bool = False):
    """Wavenumber factor along the differentiation axis."""
    q = np.asarray(q, dtype=complex)
    if scheme == "F":
        return q.copy()
    if scheme in ("FD", "AFD"):
        out = np.expm1(q * h) / h
    elif scheme in ("BD", "ABD"):
        out = -np.expm1(-q * h) / h
    elif scheme in ("CD", "ACD"):
        out = np.sinh(q * h) / h
    elif scheme in ("hC", "AhC"):
        out = 2.0 * np.sinh(q * h / 2) / h
    elif scheme == "R":
        return _q_willot(q, h, strict)
    else:
        raise InvalidInputError(f"unknown scheme {scheme!r}")
    return _snap(out, 1.0 / h)


def _q_willot(q, h: float, strict: bool):
    """``(1/h) tanh(qh/2) (exp(qh)+1)``.

    At ``qh = -i pi`` this is indeterminate.  By default every entry that
    agrees with the forward difference to round-off, and the indeterminate
    one, is replaced by the forward-difference value (its limit), so R and
    AFD become bitwise identical.  ``strict`` leaves NaN at the
    indeterminate entry instead.
    """
    fd = _base("FD", q, h)
    with np.errstate(all="ignore"):
        w = np.tanh(q * h / 2) * (np.exp(q * h) + 1.0) / h
    bad = ~np.isfinite(w) | (np.abs(np.abs(q * h) - np.pi) < 1e-12)
    w = _snap(np.where(bad, 0.0, w), 1.0 / h)
    if strict:
        return np.where(bad, np.nan + 0j, w)
    close = np.abs(w - fd) <= 1e-12 / h
    return np.where(bad | close, fd, w)


def _transverse(scheme: str, q, h: float):
    """Averaging factor contributed by a transverse axis."""
    q = np.asarray(q, dtype=complex)
    if scheme in ("AFD", "R"):
        out = (np.exp(q * h) + 1.0) / 2
    elif scheme == "ABD":
        out = (np.exp(-q * h) + 1.0) / 2
    elif scheme == "ACD":
        out = np.cosh(q * h)
    elif scheme == "AhC":
        out = np.cosh(q * h / 2)
    else:
        return np.ones_like(q)
    return _snap(out)


def qeff_1d(scheme: str, mu, n: int, h: float):
    """Effective wavenumber of ``scheme`` at mode ``mu`` (1-based, mu-order)."""
    check_scheme(scheme, 1)
    mu = np.asarray(mu)
    if np.any((mu < 1) | (mu > n)):
        raise InvalidInputError(f"mode index must lie in 1..{n}")
    q = 2j * np.pi * (mu - 1 - n // 2) / (n * h)
    out = _base(scheme, q, h)
    return out if out.ndim else complex(out)


def qeff_3d(scheme: str, mu, n, h, r: int, strict: bool = False):
    """Component ``r`` of the 3D effective wavenumber at multi-index ``mu``."""
    check_scheme(scheme, 3)
    mu = [np.asarray(v) for v in mu]
    for a in range(3):
        if np.any((mu[a] < 1) | (mu[a] > n[a])):
            raise InvalidInputError(f"mode index on axis {a} must lie in 1..{n[a]}")
    q = [2j * np.pi * (mu[a] - 1 - n[a] // 2) / (n[a] * h[a]) for a in range(3)]
    s, t = _TRANSVERSE[r]
    out = _base(scheme, q[r], h[r], strict)
    out = out * _transverse(scheme, q[s], h[s]) * _transverse(scheme, q[t], h[t])
    return out if out.ndim else complex(out)


@dataclass(frozen=True)
class SchemePair:
    """Gradient scheme ``a`` and the rule giving the divergence scheme ``b``."""

    a: str
    rule: str = "conjugate"
    b: str | None = None

    @classmethod
    def parse(cls, a: str, rule: str) -> SchemePair:
        a, rule = a.strip(), rule.strip()
        if rule.startswith("explicit:"):
            b = rule.split(":", 1)[1].strip()
            if b not in SCHEMES_3D:
                raise InvalidInputError(f"unknown divergence scheme {b!r}")
            return cls(a, "explicit", b)
        if rule not in PAIR_RULES:
            raise InvalidInputError(
                f"pair rule must be conjugate, afbr or explicit:<b>, got {rule!r}")
        return cls(a, rule)

    def validate(self, dim: int) -> None:
        check_scheme(self.a, dim)
        if self.rule == "explicit":
            check_scheme(self.b, dim)
        elif self.rule == "afbr":
            ok = ("FD",) if dim == 1 else ("AFD", "R")
            if self.a not in ok:
                raise InvalidInputError(
                    f"afbr pairing needs a in {ok} in {dim}D, got {self.a!r}")
        elif self.rule != "conjugate":
            raise InvalidInputError(f"unknown pair rule {self.rule!r}")

    def label(self) -> str:
        if self.rule == "explicit":
            return f"{self.a}/{self.b}"
        return f"{self.a}-{self.rule}"


@dataclass(frozen=True)
class WavenumberTable:
    """Per-mode ``q^a`` and ``q^b`` of shape ``(dim, *counts)``.

    ``indeterminate`` flags modes where a strict-R wavenumber is undefined.
    """

    qa: np.ndarray
    qb: np.ndarray
    indeterminate: np.ndarray

    def dot(self) -> np.ndarray:
        """Bilinear ``q^a . q^b`` per mode (no conjugation)."""
        return np.sum(self.qa * self.qb, axis=0)


def _axis_q(grid: Grid, natural: bool) -> list[np.ndarray]:
    out = []
    for r in range(grid.dim):
        n = grid.counts[r]
        kap = kappa_natural(n) if natural else kappa(n)
        shape = [1] * grid.dim
        shape[r] = n
        out.append((2j * np.pi * kap / grid.lengths[r]).reshape(shape))
    return out


def wavenumber_field(scheme: str, grid: Grid, natural: bool = False,
                     strict: bool = False) -> np.ndarray:
    """Effective wavenumber of ``scheme`` on every mode, shape ``(dim, *counts)``."""
    check_scheme(scheme, grid.dim)
    q = _axis_q(grid, natural)
    h = grid.spacings
    if grid.dim == 1:
        return _base(scheme, q[0], h[0])[None, :]
    comps = []
    for r in range(3):
        s, t = _TRANSVERSE[r]
        v = _base(scheme, q[r], h[r], strict) * _transverse(scheme, q[s], h[s]) \
            * _transverse(scheme, q[t], h[t])
        comps.append(np.broadcast_to(v, grid.counts))
    return np.stack(comps)


def resolve_pair(pair: SchemePair, grid: Grid, natural: bool = False,
                 strict: bool = False) -> WavenumberTable:
    """Tables ``(q^a, q^b)`` for a scheme pair on ``grid``."""
    pair.validate(grid.dim)
    qa = wavenumber_field(pair.a, grid, natural, strict)
    if pair.rule == "conjugate":
        qb = np.conj(qa)
    elif pair.rule == "afbr":
        qb = wavenumber_field("hC" if grid.dim == 1 else "AhC", grid, natural)
    else:
        qb = wavenumber_field(pair.b, grid, natural, strict)
    bad = np.any(~np.isfinite(qa) | ~np.isfinite(qb), axis=0)
    if bad.any():
        qa = np.where(bad, 0.0, qa)
        qb = np.where(bad, 0.0, qb)
    return WavenumberTable(qa, qb, bad)

"""Matrix-inclusion stiffness and compliance fields in 1D and 3D.

Interfaces are either sharp (``epsilon == 0``, modified Heaviside step with
value 1/2 on the interface) or smoothed with a tanh phase-field profile.
The 3D inclusion is the tensor product of three 1D inclusion densities,
i.e. a cube.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .grid import Field, Grid, SYM_ORDER

_SAMPLE_POLICIES = ("error", "midpoint")


@dataclass(frozen=True)
class Interface1D:
    c_left: float
    c_right: float
    epsilon: float = 0.0

    def __post_init__(self):
        if not self.c_left < self.c_right:
            raise InvalidInputError(
                f"need c_left < c_right, got {self.c_left}, {self.c_right}")
        if self.epsilon < 0:
            raise InvalidInputError(f"epsilon must be >= 0, got {self.epsilon}")

    @classmethod
    def default(cls, length: float = 1.0, epsilon: float = 0.0) -> Interface1D:
        return cls(length / 4, 3 * length / 4, epsilon)

    def check_cell(self, length: float) -> None:
        if not 0 < self.c_left < self.c_right < length:
            raise InvalidInputError(
                f"interfaces ({self.c_left}, {self.c_right}) must lie inside (0, {length})")

    @property
    def sharp(self) -> bool:
        return self.epsilon == 0


@dataclass(frozen=True)
class Elastic1D:
    S_M: float
    S_I: float

    def __post_init__(self):
        if not (self.S_M > 0 and self.S_I > 0):
            raise InvalidInputError("compliances must be positive")

    @classmethod
    def from_stiffness(cls, C_M: float, C_I: float) -> Elastic1D:
        if not (C_M > 0 and C_I > 0):
            raise InvalidInputError("stiffnesses must be positive")
        return cls(1.0 / C_M, 1.0 / C_I)

    @property
    def S_IM(self) -> float:
        return self.S_I - self.S_M


@dataclass(frozen=True)
class Elastic3D:
    lambda_M: float
    mu_M: float
    chi: float

    def __post_init__(self):
        if self.mu_M <= 0 or self.lambda_M < 0:
            raise InvalidInputError("need mu_M > 0 and lambda_M >= 0")
        if not self.chi > 0:
            raise InvalidInputError(f"phase contrast must be positive, got {self.chi}")

    @property
    def lambda_I(self) -> float:
        return self.chi * self.lambda_M

    @property
    def mu_I(self) -> float:
        return self.chi * self.mu_M


def phase_profile(x, c: float, epsilon: float):
    """Phase field: 0 in the matrix, 1 in the inclusion, centered at ``c``."""
    if epsilon < 0:
        raise InvalidInputError(f"epsilon must be >= 0, got {epsilon}")
    x = np.asarray(x, dtype=float)
    if epsilon == 0:
        out = np.heaviside(x - c, 0.5)
    else:
        out = 0.5 + 0.5 * np.tanh((x - c) / epsilon)
    return out if out.ndim else float(out)


def inclusion_density(x, iface: Interface1D):
    return (np.asarray(phase_profile(x, iface.c_left, iface.epsilon))
            - phase_profile(x, iface.c_right, iface.epsilon))


def compliance_1d(x, iface: Interface1D, el: Elastic1D):
    return el.S_M + el.S_IM * inclusion_density(x, iface)


def contrast_factor(x, ifaces, chi: float):
    """``1 + nu(x1) nu(x2) nu(x3) (chi - 1)`` for points ``x`` of shape (3, ...)."""
    if not chi > 0:
        raise InvalidInputError(f"phase contrast must be positive, got {chi}")
    x = np.asarray(x, dtype=float)
    nu = np.ones(x.shape[1:])
    for r in range(3):
        nu = nu * inclusion_density(x[r], ifaces[r])
    return 1.0 + nu * (chi - 1.0)


def stiffness_3d(x, ifaces, el: Elastic3D):
    """Lame moduli ``(lambda, mu)`` at points ``x`` of shape (3, ...)."""
    f = contrast_factor(x, ifaces, el.chi)
    return el.lambda_M * f, el.mu_M * f


def isotropic_stiffness_apply(lam, mu, A):
    """``lam tr(A) I + mu (A + A^T)`` for 3x3 tensors (leading two axes)."""
    A = np.asarray(A)
    tr = A[0, 0] + A[1, 1] + A[2, 2]
    out = mu * (A + np.swapaxes(A, 0, 1))
    for i in range(3):
        out[i, i] = out[i, i] + lam * tr
    return out


def isotropic_stiffness_apply_sym(lam, mu, E6):
    """Same as :func:`isotropic_stiffness_apply` on (6, ...) symmetric storage."""
    E6 = np.asarray(E6)
    tr = E6[0] + E6[1] + E6[2]
    T = 2.0 * mu * E6
    T[:3] += lam * tr
    return T


def _check_sampling(coords: np.ndarray, iface: Interface1D, policy: str) -> None:
    if not iface.sharp:
        return
    if policy not in _SAMPLE_POLICIES:
        raise InvalidInputError(f"unknown on-interface policy {policy!r}")
    if policy == "error":
        hit = np.isclose(coords, iface.c_left, rtol=0, atol=1e-12 * max(1.0, abs(iface.c_right))) | \
            np.isclose(coords, iface.c_right, rtol=0, atol=1e-12 * max(1.0, abs(iface.c_right)))
        if hit.any():
            raise InvalidInputError(
                f"sample point(s) {coords[hit].tolist()} lie on a sharp interface; "
                "pick another grid count or set on_interface='midpoint'")


def sample_stiffness_1d(grid: Grid, sampling: str, iface: Interface1D, el: Elastic1D,
                        on_interface: str = "error") -> Field:
    """Stiffness ``C = 1/S`` sampled at nodes or centers of a 1D grid.

    With a sharp interface a sample point on the interface is rejected unless
    ``on_interface='midpoint'``, in which case the step value 1/2 is used.
    """
    if grid.dim != 1:
        raise InvalidInputError("1D stiffness needs a 1D grid")
    iface.check_cell(grid.lengths[0])
    x = grid.coords(sampling)
    _check_sampling(x, iface, on_interface)
    return Field(grid, 1.0 / compliance_1d(x, iface, el), "scalar", sampling)


def sample_lame_3d(grid: Grid, sampling: str, ifaces, el: Elastic3D,
                   on_interface: str = "error") -> tuple[Field, Field]:
    """Lame fields ``(lambda, mu)`` at nodes or centers of a 3D grid."""
    if grid.dim != 3:
        raise InvalidInputError("3D stiffness needs a 3D grid")
    for r in range(3):
        ifaces[r].check_cell(grid.lengths[r])
        _check_sampling(grid.coords(sampling, r), ifaces[r], on_interface)
    lam, mu = stiffness_3d(np.stack(grid.mesh(sampling)), ifaces, el)
    return Field(grid, lam, "scalar", sampling), Field(grid, mu, "scalar", sampling)


def uniform_sym_field(grid: Grid, values, sampling: str = "node") -> Field:
    """Spatially constant symmetric-tensor field from six components."""
    v = np.asarray(values, dtype=float).reshape(6, *([1] * grid.dim))
    return Field(grid, np.broadcast_to(v, (6, *grid.counts)), "sym2", sampling)


__all__ = [
    "Interface1D", "Elastic1D", "Elastic3D", "phase_profile", "inclusion_density",
    "compliance_1d", "contrast_factor", "stiffness_3d", "isotropic_stiffness_apply",
    "isotropic_stiffness_apply_sym", "sample_stiffness_1d", "sample_lame_3d",
    "uniform_sym_field", "SYM_ORDER",
]

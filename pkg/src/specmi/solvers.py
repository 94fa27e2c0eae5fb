"""Green-function preconditioned fixed-point solvers (TD, PCD and DGO).

All loops run in natural FFT order; modal results are reordered to
mu-order (TD/PCD) on return.  The DGO unknown is returned in its native
``omega = 0..n-1`` order.

Loop for TD/PCD, starting from ``u = 0`` and a zero previous increment::

    E~ = Re backward(sym(u (x) q^a))
    T  = C[Ebar - E*] + C E~
    du = G forward(T) q^b
    u += du
    residual = sum |du - du_prev|

The DGO loop replaces the last three lines with ``dE = Gamma forward(T)``.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
import scipy.fft as sfft

from .errors import InvalidInputError, NumericFailure
from .grid import Field, Grid, SYM_ORDER, require_sampling
from .green import DgoTable, Medium1D, Medium3D, dgo_table, green_1d, green_3d
from .microstructure import isotropic_stiffness_apply_sym
from .transforms import dgo_phase, fft_nat, half_sample_phase, ifft_nat
from .wavenumbers import SchemePair, resolve_pair

DISCRETIZATIONS = ("TD", "PCD", "DGO")
TOL_MODES = ("absolute", "relative")


@dataclass
class SolverConfig:
    discretization: str = "TD"
    pair: SchemePair | None = None
    medium: Medium1D | Medium3D | None = None
    tol: float = 1e-8
    tol_mode: str = "relative"
    maxit: int = 1000
    Ebar: float | np.ndarray = 1.0
    eigenstrain: Field | None = None
    m_trunc: int | tuple | None = None
    polarization: bool = False
    dgo_weight: str = "sinc"
    strict_r: bool = False
    dgo: DgoTable | None = None

    def validate(self, dim: int) -> None:
        if self.discretization not in DISCRETIZATIONS:
            raise InvalidInputError(f"unknown discretization {self.discretization!r}")
        if self.tol_mode not in TOL_MODES:
            raise InvalidInputError(f"tol_mode must be absolute or relative, got {self.tol_mode!r}")
        if not self.tol >= 0:
            raise InvalidInputError(f"tol must be >= 0, got {self.tol}")
        if int(self.maxit) != self.maxit or self.maxit < 1:
            raise InvalidInputError(f"maxit must be a positive integer, got {self.maxit}")
        if self.medium is None:
            raise InvalidInputError("a reference medium is required")
        if dim == 1 and not isinstance(self.medium, Medium1D):
            raise InvalidInputError("1D solve needs a Medium1D")
        if dim == 3 and not isinstance(self.medium, Medium3D):
            raise InvalidInputError("3D solve needs a Medium3D")
        if self.discretization != "DGO":
            if self.pair is None:
                raise InvalidInputError(f"{self.discretization} needs a scheme pair")
            self.pair.validate(dim)


@dataclass
class SolveResult:
    modes: np.ndarray
    strain: Field
    stress: Field
    iterations: int
    history: list[float]
    converged: bool
    timings: dict = field(default_factory=dict)


def residual(delta, delta_prev=None) -> float:
    """Sum over modes and components of ``|delta - delta_prev|``."""
    delta = np.asarray(delta)
    if delta_prev is None:
        return float(np.abs(delta).sum())
    return float(np.abs(delta - np.asarray(delta_prev)).sum())


def _ebar6(Ebar) -> np.ndarray:
    E = np.asarray(Ebar, dtype=float)
    if E.shape == (3, 3):
        if not np.allclose(E, E.T, rtol=0, atol=1e-15):
            raise InvalidInputError("mean strain must be symmetric")
        return np.array([E[i, j] for i, j in SYM_ORDER])
    if E.shape != (6,):
        raise InvalidInputError(f"3D mean strain needs 6 components or a 3x3 matrix, got {E.shape}")
    return E


def _frob6(v) -> np.ndarray:
    """Frobenius norm of 6-stored symmetric tensors (leading axis)."""
    v = np.asarray(v)
    return np.sqrt(np.sum(v[:3] ** 2, axis=0) + 2 * np.sum(v[3:] ** 2, axis=0))


class _Problem:
    """Stiffness application and load for one solve."""

    def __init__(self, grid: Grid, stiffness, cfg: SolverConfig, sampling: str):
        self.grid = grid
        self.dim = grid.dim
        if self.dim == 1:
            if not isinstance(stiffness, Field) or stiffness.rank != "scalar":
                raise InvalidInputError("1D stiffness must be a scalar Field")
            require_sampling(stiffness, sampling)
            self.C = np.asarray(stiffness.data, dtype=float)
            if not np.all(np.isfinite(self.C)) or np.any(self.C <= 0):
                raise InvalidInputError("stiffness must be positive and finite")
            self.Ebar = float(np.asarray(cfg.Ebar, dtype=float).reshape(()))
            Ebar_f = np.full(grid.counts, self.Ebar)
            ebar_norm = abs(self.Ebar)
        else:
            try:
                lam, mu = stiffness
            except (TypeError, ValueError):
                raise InvalidInputError("3D stiffness must be a (lambda, mu) pair of Fields") from None
            for f in (lam, mu):
                require_sampling(f, sampling)
            self.lam = np.asarray(lam.data, dtype=float)
            self.mu = np.asarray(mu.data, dtype=float)
            if np.any(self.mu <= 0) or np.any(self.lam < 0):
                raise InvalidInputError("Lame fields need mu > 0 and lambda >= 0")
            self.Ebar = _ebar6(cfg.Ebar)
            Ebar_f = np.broadcast_to(self.Ebar.reshape(6, *([1] * 3)), (6, *grid.counts))
            ebar_norm = float(_frob6(self.Ebar))
        load = np.array(Ebar_f, dtype=float)
        estar_norm = 0.0
        if cfg.eigenstrain is not None:
            es = cfg.eigenstrain
            require_sampling(es, sampling)
            expected = "scalar" if self.dim == 1 else "sym2"
            if es.rank != expected or es.grid.counts != grid.counts:
                raise InvalidInputError("eigenstrain field does not match the grid")
            load = load - es.data
            estar_norm = float(np.max(np.abs(es.data) if self.dim == 1 else _frob6(es.data)))
        self.T0 = self.apply_C(load)
        scale = ebar_norm if ebar_norm > 0 else estar_norm
        self.scale = (scale if scale > 0 else 1.0) * np.sqrt(grid.size)

    def apply_C(self, E):
        if self.dim == 1:
            return self.C * E
        return isotropic_stiffness_apply_sym(self.lam, self.mu, E)


def _sym_outer(u, qa) -> np.ndarray:
    """Six components of sym(u (x) q^a) for mode arrays of shape (3, ...)."""
    return np.stack([0.5 * (u[i] * qa[j] + u[j] * qa[i]) for i, j in SYM_ORDER])


def _stress_dot(T6, qb) -> np.ndarray:
    """``T q^b`` with ``T`` in 6-storage; returns shape (3, ...)."""
    idx = {}
    for c, (i, j) in enumerate(SYM_ORDER):
        idx[(i, j)] = idx[(j, i)] = c
    return np.stack([sum(T6[idx[(i, j)]] * qb[j] for j in range(3)) for i in range(3)])


def _check_finite(value: float, it: int) -> None:
    if not np.isfinite(value):
        raise NumericFailure(f"non-finite residual at iteration {it}")


def _threshold(cfg: SolverConfig, prob: _Problem) -> float:
    return cfg.tol * prob.scale if cfg.tol_mode == "relative" else cfg.tol


def _finish(prob, grid, sampling, Et, modes, history, cfg, timings):
    T = prob.T0 + prob.apply_C(Et)
    rank = "scalar" if grid.dim == 1 else "sym2"
    thr = _threshold(cfg, prob)
    conv = bool(history) and history[-1] < thr
    rel = [h / prob.scale for h in history] if cfg.tol_mode == "relative" else list(history)
    return SolveResult(modes, Field(grid, Et, rank, sampling), Field(grid, T, rank, sampling),
                       len(history), rel, conv, timings)


def _solve_displacement(grid: Grid, stiffness, cfg: SolverConfig, sampling: str) -> SolveResult:
    t0 = time.perf_counter()
    cfg.validate(grid.dim)
    prob = _Problem(grid, stiffness, cfg, sampling)
    d = grid.dim
    table = resolve_pair(cfg.pair, grid, natural=True, strict=cfg.strict_r)
    qa, qb = table.qa, table.qb
    if d == 1:
        G = green_1d(cfg.medium.C_H, qa[0], qb[0])
    else:
        G = green_3d(cfg.medium, qa, qb, null=table.indeterminate)
    if sampling == "center":
        ph_f = half_sample_phase(grid.counts, -1, natural=True)
        ph_b = np.conj(ph_f)
    else:
        ph_f = ph_b = None

    def forward(x):
        y = fft_nat(x, d)
        return y if ph_f is None else ph_f * y

    def backward(y):
        return ifft_nat(y if ph_b is None else ph_b * y, d).real

    def strain(u):
        if d == 1:
            return backward(u * qa[0])
        return backward(_sym_outer(u, qa))

    def increment(T):
        Tm = forward(T)
        if d == 1:
            return G * Tm * qb[0]
        return np.einsum("ij...,j...->i...", G, _stress_dot(Tm, qb))

    u = np.zeros(grid.counts if d == 1 else (3, *grid.counts), dtype=complex)
    prev = None
    thr = _threshold(cfg, prob)
    history: list[float] = []
    t1 = time.perf_counter()
    for it in range(1, int(cfg.maxit) + 1):
        T = prob.T0 + prob.apply_C(strain(u))
        du = increment(T)
        u += du
        r = residual(du, prev)
        _check_finite(r, it)
        history.append(r)
        prev = du
        if r < thr:
            break
    t2 = time.perf_counter()
    Et = strain(u)
    modes = sfft.fftshift(u, axes=tuple(range(u.ndim - d, u.ndim)))
    return _finish(prob, grid, sampling, Et, modes, history, cfg,
                   {"setup": t1 - t0, "iterate": t2 - t1})


def solve_td(grid: Grid, stiffness, cfg: SolverConfig) -> SolveResult:
    """Trapezoidal (node-sampled) displacement-based solver."""
    return _solve_displacement(grid, stiffness, cfg, "node")


def solve_pcd(grid: Grid, stiffness, cfg: SolverConfig) -> SolveResult:
    """Piecewise-constant (center-sampled) displacement-based solver."""
    return _solve_displacement(grid, stiffness, cfg, "center")


def solve_dgo(grid: Grid, stiffness, cfg: SolverConfig) -> SolveResult:
    """Strain-based solver with the discrete Green operator.

    With ``cfg.polarization`` the operator acts on ``T - C_H E`` and the
    strain modes are replaced rather than incremented.
    """
    t0 = time.perf_counter()
    cfg.validate(grid.dim)
    prob = _Problem(grid, stiffness, cfg, "center")
    d = grid.dim
    table = cfg.dgo if cfg.dgo is not None else dgo_table(cfg.medium, grid, cfg.m_trunc, cfg.dgo_weight)
    if table.grid.counts != grid.counts or table.grid.lengths != grid.lengths:
        raise InvalidInputError("DGO table was built for a different grid")
    ph_f = dgo_phase(grid.counts, -1)
    ph_b = np.conj(ph_f)

    def ref_apply(E):
        if d == 1:
            return cfg.medium.C_H * E
        return isotropic_stiffness_apply_sym(cfg.medium.lambda_H, cfg.medium.mu_H, E)

    Em = np.zeros(grid.counts if d == 1 else (6, *grid.counts), dtype=complex)
    prev = None
    thr = _threshold(cfg, prob)
    history: list[float] = []
    t1 = time.perf_counter()
    # a diverging run overflows before the finite check reports it
    with np.errstate(over="ignore", invalid="ignore"):
        for it in range(1, int(cfg.maxit) + 1):
            Et = ifft_nat(ph_b * Em, d).real
            Tm = ph_f * fft_nat(prob.T0 + prob.apply_C(Et), d)
            if cfg.polarization:
                dE = table.apply(Tm - ref_apply(Em)) - Em
            else:
                dE = table.apply(Tm)
            Em += dE
            r = residual(dE, prev)
            _check_finite(r, it)
            history.append(r)
            prev = dE
            if r < thr:
                break
    t2 = time.perf_counter()
    Et = ifft_nat(ph_b * Em, d).real
    return _finish(prob, grid, "center", Et, Em.copy(), history, cfg,
                   {"setup": t1 - t0, "iterate": t2 - t1})


SOLVERS = {"TD": solve_td, "PCD": solve_pcd, "DGO": solve_dgo}


def solve(grid: Grid, stiffness, cfg: SolverConfig) -> SolveResult:
    """Dispatch on ``cfg.discretization``."""
    if cfg.discretization not in SOLVERS:
        raise InvalidInputError(f"unknown discretization {cfg.discretization!r}")
    return SOLVERS[cfg.discretization](grid, stiffness, cfg)

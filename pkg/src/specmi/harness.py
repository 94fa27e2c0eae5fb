"""Experiment orchestration and deterministic text output.

Every file is written with ``repr`` float formatting and ``\\n`` line
endings, so identical configurations give identical bytes.  Wall-clock
timings are only written when explicitly requested.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
import scipy.fft as sfft

from .analytic import AnalyticCase, analytic_displacement, analytic_strain, analytic_stress, \
    exact_modes, truncated_series
from .config import Algorithm, ConfigError, RunConfig, dump_config
from .errors import InvalidInputError, NumericFailure
from .green import Medium1D, Medium3D, dgo_table
from .grid import Field, Grid, SYM_LABELS
from .microstructure import Elastic1D, Elastic3D, Interface1D, inclusion_density, \
    sample_lame_3d, sample_stiffness_1d, uniform_sym_field
from .solvers import SolveResult, SolverConfig, solve
from .transforms import ifft_nat, half_sample_phase
from .wavenumbers import SchemePair


def fmt(v) -> str:
    """Shortest round-trip decimal for floats, plain text otherwise."""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(path: Path, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")


# -- problem assembly ---------------------------------------------------------------

@dataclass
class Problem:
    cfg: RunConfig
    grid: Grid
    ifaces: list
    el: Elastic1D | Elastic3D
    medium: Medium1D | Medium3D

    @property
    def sampling(self) -> str:
        return "node" if self.cfg.discretization == "TD" else "center"


def reference_medium(cfg: RunConfig):
    rule = cfg.medium
    if cfg.dim == 1:
        C_I = cfg.contrast * cfg.C_M
        if rule == "mean":
            return Medium1D(0.5 * (cfg.C_M + C_I))
        if rule == "inclusion":
            return Medium1D(C_I)
        if rule == "stiffest":
            return Medium1D(max(cfg.C_M, C_I))
        return Medium1D(float(rule.split(":", 1)[1]))
    lam_I, mu_I = cfg.contrast * cfg.lambda_M, cfg.contrast * cfg.mu_M
    if rule == "mean":
        return Medium3D(0.5 * (cfg.lambda_M + lam_I), 0.5 * (cfg.mu_M + mu_I))
    if rule == "inclusion":
        return Medium3D(lam_I, mu_I)
    if rule == "stiffest":
        return Medium3D(max(cfg.lambda_M, lam_I), max(cfg.mu_M, mu_I))
    lam, mu = (float(v) for v in rule.split(":", 1)[1].split(","))
    return Medium3D(lam, mu)


def build_problem(cfg: RunConfig) -> Problem:
    grid = Grid.regular(cfg.lengths, cfg.counts)
    ifaces = [Interface1D(cfg.left * L, cfg.right * L, cfg.epsilon * L) for L in cfg.lengths]
    if cfg.dim == 1:
        el = Elastic1D.from_stiffness(cfg.C_M, cfg.contrast * cfg.C_M)
    else:
        el = Elastic3D(cfg.lambda_M, cfg.mu_M, cfg.contrast)
    return Problem(cfg, grid, ifaces, el, reference_medium(cfg))


def stiffness(prob: Problem, sampling: str):
    cfg = prob.cfg
    if cfg.dim == 1:
        return sample_stiffness_1d(prob.grid, sampling, prob.ifaces[0], prob.el, cfg.on_interface)
    return sample_lame_3d(prob.grid, sampling, prob.ifaces, prob.el, cfg.on_interface)


def solver_config(prob: Problem, sampling: str, dgo=None) -> SolverConfig:
    cfg = prob.cfg
    eig = None
    if cfg.eigenstrain is not None:
        if cfg.dim == 1:
            eig = Field(prob.grid, np.full(prob.grid.counts, cfg.eigenstrain[0]), "scalar", sampling)
        else:
            eig = uniform_sym_field(prob.grid, cfg.eigenstrain, sampling)
    Ebar = cfg.Ebar[0] if cfg.dim == 1 else np.array(cfg.Ebar)
    pair = None if cfg.discretization == "DGO" else SchemePair.parse(cfg.scheme, cfg.pair)
    return SolverConfig(cfg.discretization, pair, prob.medium, cfg.tol, cfg.tol_mode, cfg.maxit,
                        Ebar, eig, cfg.m_trunc, cfg.polarization, cfg.dgo_weight, cfg.strict_r, dgo)


def run_problem(cfg: RunConfig) -> tuple[Problem, SolveResult]:
    prob = build_problem(cfg)
    if "displacement" in cfg.fields and cfg.discretization == "DGO":
        raise ConfigError("[output] fields: displacement is not available for DGO")
    C = stiffness(prob, prob.sampling)
    t0 = time.perf_counter()
    dgo = None
    if cfg.discretization == "DGO":
        dgo = dgo_table(prob.medium, prob.grid, cfg.m_trunc, cfg.dgo_weight)
    t1 = time.perf_counter()
    res = solve(prob.grid, C, solver_config(prob, prob.sampling, dgo))
    res.timings["dgo_table"] = t1 - t0
    return prob, res


# -- field output ---------------------------------------------------------------

def probe_layer(prob: Problem, sampling: str) -> int:
    """Index along axis 3 of the first sample layer inside the inclusion."""
    z = prob.grid.coords(sampling, 2)
    inside = np.flatnonzero(z > prob.ifaces[2].c_left)
    return int(inside[0])


def _point_rows(grid: Grid, sampling: str, values: np.ndarray, mask=None):
    """Rows of (indices, coordinates, values...) in row-major order."""
    coords = [grid.coords(sampling, r) for r in range(grid.dim)]
    idx = np.indices(grid.counts).reshape(grid.dim, -1).T
    vals = values.reshape(values.shape[0], -1).T
    rows = []
    for k, ii in enumerate(idx):
        if mask is not None and not mask[tuple(ii)]:
            continue
        rows.append([*ii, *(coords[r][ii[r]] for r in range(grid.dim)), *vals[k]])
    return rows


def _index_header(dim):
    return ["i1", "x"] if dim == 1 else ["i1", "i2", "i3", "x", "y", "z"]


def displacement_field(prob: Problem, res: SolveResult) -> np.ndarray:
    """Real-space periodic displacement from the modal unknown."""
    d = prob.grid.dim
    u = sfft.ifftshift(res.modes, axes=tuple(range(res.modes.ndim - d, res.modes.ndim)))
    if prob.sampling == "center":
        u = half_sample_phase(prob.grid.counts, +1, natural=True) * u
    out = ifft_nat(u, d).real
    return out[None] if d == 1 else out


def field_tables(prob: Problem, res: SolveResult, slice_only: bool):
    """(name, header, rows) for every requested field."""
    cfg, grid = prob.cfg, prob.grid
    samp = res.strain.sampling
    mask = None
    if cfg.dim == 3 and slice_only:
        k = probe_layer(prob, samp)
        mask = np.zeros(grid.counts, dtype=bool)
        mask[:, :, k] = True
    suffix = "_slice" if mask is not None else ""
    out = []
    head = _index_header(cfg.dim)
    for name in cfg.fields:
        if name == "strain":
            vals = res.strain.data[None] if cfg.dim == 1 else res.strain.data
            cols = ["E"] if cfg.dim == 1 else [f"E{c}" for c in SYM_LABELS]
        elif name == "stress":
            if cfg.dim == 1:
                vals = res.stress.data[None]
                cols = ["T", "T_over_C_M"]
                vals = np.concatenate([vals, vals / cfg.C_M])
            else:
                vals = np.concatenate([res.stress.data, res.stress.data / cfg.mu_M])
                cols = [f"T{c}" for c in SYM_LABELS] + [f"T{c}_over_mu_M" for c in SYM_LABELS]
        else:
            vals = displacement_field(prob, res)
            cols = ["u"] if cfg.dim == 1 else ["u1", "u2", "u3"]
        out.append((name + suffix, head + cols, _point_rows(grid, samp, vals, mask)))
    return out


def write_trace(path: Path, res: SolveResult, timing: bool) -> None:
    header = ["iteration", "residual"]
    rows = [[k + 1, r] for k, r in enumerate(res.history)]
    if timing:
        per = 1000.0 * res.timings.get("iterate", 0.0) / max(len(rows), 1)
        header.append("millis")
        rows = [row + [per * row[0]] for row in rows]
    write_csv(path, header, rows)


def result_lines(prob: Problem, res: SolveResult, timing: bool) -> list[str]:
    T = res.stress.data
    lines = ["[result]",
             f"iterations = {res.iterations}",
             f"converged = {fmt(res.converged)}",
             f"residual = {fmt(res.history[-1])}",
             f"strain_mean = {fmt(float(np.mean(res.strain.data)))}"]
    if prob.cfg.dim == 1:
        lines.append(f"stress_mean = {fmt(float(T.mean()))}")
        lines.append(f"stress_nonuniformity = {fmt(float(np.ptp(T) / abs(T.mean())) if T.mean() else 0.0)}")
        case = analytic_case(prob)
        if case is not None:
            x = prob.grid.coords(res.strain.sampling)
            dev = np.abs(res.strain.data - analytic_strain(case, x))
            lines.append(f"max_strain_deviation = {fmt(float(dev.max()))}")
    else:
        for c, lab in enumerate(SYM_LABELS):
            lines.append(f"stress_mean_{lab} = {fmt(float(T[c].mean()))}")
    if timing:
        for k in sorted(res.timings):
            lines.append(f"time_{k}_s = {fmt(res.timings[k])}")
    return lines


def analytic_case(prob: Problem) -> AnalyticCase | None:
    if prob.cfg.dim != 1 or prob.cfg.eigenstrain is not None:
        return None
    return AnalyticCase(prob.grid.cell, prob.ifaces[0], prob.el, prob.cfg.Ebar[0])


def run_single(cfg: RunConfig, out: Path, timing: bool = False) -> SolveResult:
    """Solve one configuration and write fields, trace and summary into ``out``."""
    out.mkdir(parents=True, exist_ok=True)
    prob, res = run_problem(cfg)
    for name, header, rows in field_tables(prob, res, slice_only=not cfg.full_volume):
        write_csv(out / f"{name}.csv", header, rows)
    if cfg.trace:
        write_trace(out / "trace.csv", res, timing)
    with open(out / "summary.txt", "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dump_config(cfg))
        fh.write("\n".join(result_lines(prob, res, timing)) + "\n")
    return res


# -- comparisons -------------------------------------------------------------------

def _probe_component(cfg: RunConfig) -> int:
    if cfg.dim == 1:
        return 0
    return int(np.argmax(np.abs(cfg.Ebar)))


def compare_row(cfg: RunConfig, alg: Algorithm, out: Path, timing: bool):
    sub = cfg.with_algorithm(alg)
    tag = alg.label().replace(":", "_")
    t0 = time.perf_counter()
    try:
        prob, res = run_problem(sub)
    except NumericFailure as exc:
        row = [alg.label(), 0, "numeric-failure", float("nan"), float("nan"), float("nan"), float("nan")]
        return row + ([time.perf_counter() - t0] if timing else []), str(exc)
    wall = time.perf_counter() - t0
    samp = res.stress.sampling
    comp = _probe_component(cfg)
    if cfg.dim == 1:
        T = res.stress.data
        probe = T / cfg.C_M
        case = analytic_case(prob)
        dev = float(np.max(np.abs(res.strain.data - analytic_strain(case, prob.grid.coords(samp))))) \
            if case is not None else float("nan")
    else:
        k = probe_layer(prob, samp)
        probe = res.stress.data[comp][:, :, k] / cfg.mu_M
        dev = float("nan")
    for name, header, rows in field_tables(prob, res, slice_only=True):
        write_csv(out / f"{tag}_{name}.csv", header, rows)
    status = "converged" if res.converged else "not-converged"
    row = [alg.label(), res.iterations, status, res.history[-1],
           float(np.max(probe)), float(np.mean(probe)), dev]
    return row + ([wall] if timing else []), None


def run_compare(cfg: RunConfig, out: Path, timing: bool = False) -> list[list]:
    """One row per listed algorithm plus per-algorithm probe files."""
    if not cfg.algorithms:
        raise ConfigError("[compare] algorithms: at least one algorithm is required")
    out.mkdir(parents=True, exist_ok=True)
    header = ["algorithm", "iterations", "status", "final_residual", "probe_max", "probe_mean",
              "max_strain_deviation"]
    if timing:
        header.append("wall_s")
    rows, notes = [], []
    for alg in cfg.algorithms:
        row, note = compare_row(cfg, alg, out, timing)
        rows.append(row)
        if note:
            notes.append(f"{alg.label()}: {note}")
    write_csv(out / "compare.csv", header, rows)
    with open(out / "summary.txt", "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dump_config(cfg))
        comp = SYM_LABELS[_probe_component(cfg)] if cfg.dim == 3 else "T"
        fh.write(f"[result]\nprobe_component = {comp}\nrows = {len(rows)}\n")
        for note in notes:
            fh.write(f"# {note}\n")
    return rows


# -- Gibbs and analytic -----------------------------------------------------------------

@dataclass
class GibbsSummary:
    m: int
    overshoot: float
    max_error: float
    interface_value: float
    midpoint: float


def _require_1d(cfg: RunConfig, what: str) -> None:
    if cfg.dim != 1:
        raise ConfigError(f"[problem] dim: {what} is 1D only")


def gibbs_data(cfg: RunConfig):
    """Dense evaluation grid, exact strain and truncated series for each m."""
    _require_1d(cfg, "gibbs")
    prob = build_problem(replace_eigen(cfg))
    case = analytic_case(prob)
    L = cfg.lengths[0]
    x = np.arange(cfg.points) * (L / cfg.points)
    exact = analytic_strain(case, x)
    series = {m: np.real(truncated_series(exact_modes(case, m), x, L)) for m in cfg.m_list}
    return case, x, exact, series


def replace_eigen(cfg: RunConfig) -> RunConfig:
    return replace(cfg, eigenstrain=None)


def gibbs_summaries(case, x, exact, series) -> list[GibbsSummary]:
    c = case.iface.c_left
    on_iface = np.isclose(x, case.iface.c_left, atol=1e-12) | np.isclose(x, case.iface.c_right, atol=1e-12)
    left = float(analytic_strain(case, c - 1e-9))
    right = float(analytic_strain(case, c + 1e-9))
    mid = 0.5 * (left + right)
    top = float(np.max(exact[~on_iface]))
    j = int(np.argmin(np.abs(x - c)))
    out = []
    for m, f in series.items():
        out.append(GibbsSummary(m, float(np.max(f) - top),
                                float(np.max(np.abs(f - exact)[~on_iface])), float(f[j]), mid))
    return out


def run_gibbs(cfg: RunConfig, out: Path) -> list[GibbsSummary]:
    out.mkdir(parents=True, exist_ok=True)
    case, x, exact, series = gibbs_data(cfg)
    ms = list(series)
    write_csv(out / "gibbs.csv", ["x", "E"] + [f"F{m}E" for m in ms],
              [[x[i], exact[i], *(series[m][i] for m in ms)] for i in range(x.size)])
    summ = gibbs_summaries(case, x, exact, series)
    write_csv(out / "gibbs_summary.csv",
              ["m", "overshoot", "max_error", "value_at_left_interface", "midpoint"],
              [[s.m, s.overshoot, s.max_error, s.interface_value, s.midpoint] for s in summ])
    return summ


def run_analytic(cfg: RunConfig, out: Path) -> None:
    """Reference curves of the closed-form solution on the dense grid."""
    _require_1d(cfg, "analytic")
    out.mkdir(parents=True, exist_ok=True)
    prob = build_problem(replace_eigen(cfg))
    case = analytic_case(prob)
    L = cfg.lengths[0]
    x = np.arange(cfg.points + 1) * (L / cfg.points)
    nu = inclusion_density(x, case.iface)
    E = analytic_strain(case, x)
    u = analytic_displacement(case, x)
    T = analytic_stress(case)
    write_csv(out / "analytic.csv", ["x", "nu", "E", "u", "T"],
              [[x[i], nu[i], E[i], u[i], T] for i in range(x.size)])


__all__ = ["run_single", "run_compare", "run_gibbs", "run_analytic", "build_problem",
           "run_problem", "gibbs_data", "gibbs_summaries", "InvalidInputError"]

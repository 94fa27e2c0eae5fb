"""INI run configuration: parsing, validation and canonical echo.

Positions and widths in ``[interface]`` are fractions of the cell length.
Unknown sections or keys are rejected.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, fields, replace

import numpy as np

from .errors import InvalidInputError
from .wavenumbers import SchemePair, SCHEMES_3D

MEDIUM_RULES = ("mean", "inclusion", "stiffest")

DEFAULTS = {
    "problem": {"dim": "1", "counts": "50", "lengths": ""},
    "material": {"C_M": "1.0", "contrast": "100.0", "lambda_M": "0.6", "mu_M": "0.6"},
    "interface": {"left": "0.25", "right": "0.75", "epsilon": "0.0", "on_interface": "error"},
    "solver": {"discretization": "TD", "scheme": "", "pair": "afbr", "medium": "",
               "tol": "1e-08", "tol_mode": "relative", "maxit": "1000", "m_trunc": "",
               "polarization": "false", "dgo_weight": "sinc", "strict_r": "false"},
    "load": {"Ebar": "", "eigenstrain": "none"},
    "output": {"fields": "strain,stress", "trace": "true", "full_volume": "false"},
    "compare": {"algorithms": ""},
    "gibbs": {"m_list": "5,15,25", "points": "512"},
}


class ConfigError(InvalidInputError):
    """Configuration problem; the message names the offending section/key."""


@dataclass(frozen=True)
class Algorithm:
    discretization: str
    scheme: str | None = None
    pair: str | None = None

    @classmethod
    def parse(cls, text: str) -> Algorithm:
        parts = [p.strip() for p in text.split(":")]
        disc = parts[0].upper()
        if disc == "DGO":
            if len(parts) != 1:
                raise ConfigError(f"[compare] algorithms: DGO takes no scheme, got {text!r}")
            return cls("DGO")
        if disc not in ("TD", "PCD") or len(parts) not in (2, 3):
            raise ConfigError(
                f"[compare] algorithms: expected TD:<a>[:<rule>], PCD:<a>[:<rule>] or DGO, got {text!r}")
        rule = ":".join(parts[2:]) if len(parts) == 3 else "conjugate"
        return cls(disc, parts[1], rule)

    def label(self) -> str:
        if self.discretization == "DGO":
            return "DGO"
        return f"{self.discretization}:{self.scheme}:{self.pair}"


@dataclass(frozen=True)
class RunConfig:
    dim: int = 1
    counts: tuple[int, ...] = (50,)
    lengths: tuple[float, ...] = (1.0,)
    C_M: float = 1.0
    contrast: float = 100.0
    lambda_M: float = 0.6
    mu_M: float = 0.6
    left: float = 0.25
    right: float = 0.75
    epsilon: float = 0.0
    on_interface: str = "error"
    discretization: str = "TD"
    scheme: str = "FD"
    pair: str = "afbr"
    medium: str = "mean"
    tol: float = 1e-8
    tol_mode: str = "relative"
    maxit: int = 1000
    m_trunc: tuple[int, ...] | None = None
    polarization: bool = False
    dgo_weight: str = "sinc"
    strict_r: bool = False
    Ebar: tuple[float, ...] = (1.0,)
    eigenstrain: tuple[float, ...] | None = None
    fields: tuple[str, ...] = ("strain", "stress")
    trace: bool = True
    full_volume: bool = False
    algorithms: tuple[Algorithm, ...] = field(default_factory=tuple)
    m_list: tuple[int, ...] = (5, 15, 25)
    points: int = 512

    def algorithm(self) -> Algorithm:
        if self.discretization == "DGO":
            return Algorithm("DGO")
        return Algorithm(self.discretization, self.scheme, self.pair)

    def with_algorithm(self, alg: Algorithm) -> RunConfig:
        if alg.discretization == "DGO":
            return replace(self, discretization="DGO")
        return replace(self, discretization=alg.discretization, scheme=alg.scheme, pair=alg.pair)


# -- parsing helpers -------------------------------------------------------------

def _err(section, key, msg):
    return ConfigError(f"[{section}] {key}: {msg}")


def _floats(section, key, text, count=None):
    try:
        vals = tuple(float(v) for v in text.replace(" ", "").split(",") if v != "")
    except ValueError:
        raise _err(section, key, f"expected number(s), got {text!r}") from None
    if count is not None and len(vals) != count:
        raise _err(section, key, f"expected {count} value(s), got {len(vals)}")
    if not all(np.isfinite(vals)):
        raise _err(section, key, "values must be finite")
    return vals


def _ints(section, key, text, count=None):
    vals = _floats(section, key, text, count)
    if any(v != int(v) for v in vals):
        raise _err(section, key, f"expected integer(s), got {text!r}")
    return tuple(int(v) for v in vals)


def _bool(section, key, text):
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise _err(section, key, f"expected true/false, got {text!r}")


def _choice(section, key, text, options):
    if text not in options:
        raise _err(section, key, f"must be one of {', '.join(options)}, got {text!r}")
    return text


def _per_axis(vals, dim, section, key):
    if len(vals) == 1:
        return vals * dim
    if len(vals) != dim:
        raise _err(section, key, f"expected 1 or {dim} values, got {len(vals)}")
    return vals


def parse_config(text: str, source: str = "<config>") -> RunConfig:
    """Parse INI text into a validated :class:`RunConfig`.

    A ``[result]`` section (written into run summaries) is ignored so that
    summaries re-parse to the same configuration.
    """
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from None
    raw = {s: dict(v) for s, v in DEFAULTS.items()}
    for section in cp.sections():
        if section == "result":
            continue
        if section not in DEFAULTS:
            raise ConfigError(f"unknown section [{section}]")
        for key, value in cp.items(section):
            if key not in DEFAULTS[section]:
                raise _err(section, key, "unknown key")
            raw[section][key] = value.strip()

    p, m, i, s, ld, o = (raw[k] for k in ("problem", "material", "interface", "solver", "load", "output"))
    dim = _ints("problem", "dim", p["dim"], 1)[0]
    if dim not in (1, 3):
        raise _err("problem", "dim", f"must be 1 or 3, got {dim}")
    counts = _per_axis(_ints("problem", "counts", p["counts"]), dim, "problem", "counts")
    if any(n < 2 for n in counts):
        raise _err("problem", "counts", "grid counts must be >= 2")
    if p["lengths"]:
        lengths = _per_axis(_floats("problem", "lengths", p["lengths"]), dim, "problem", "lengths")
    else:
        # 1D: unit cell; 3D: unit grid spacing
        lengths = (1.0,) if dim == 1 else tuple(float(n) for n in counts)
    if any(v <= 0 for v in lengths):
        raise _err("problem", "lengths", "lengths must be positive")

    C_M = _floats("material", "C_M", m["C_M"], 1)[0]
    contrast = _floats("material", "contrast", m["contrast"], 1)[0]
    lambda_M = _floats("material", "lambda_M", m["lambda_M"], 1)[0]
    mu_M = _floats("material", "mu_M", m["mu_M"], 1)[0]
    if C_M <= 0:
        raise _err("material", "C_M", "must be positive")
    if contrast <= 0:
        raise _err("material", "contrast", "must be positive")
    if mu_M <= 0 or lambda_M < 0:
        raise _err("material", "mu_M", "need mu_M > 0 and lambda_M >= 0")

    left = _floats("interface", "left", i["left"], 1)[0]
    right = _floats("interface", "right", i["right"], 1)[0]
    eps = _floats("interface", "epsilon", i["epsilon"], 1)[0]
    if not 0 < left < right < 1:
        raise _err("interface", "left", "need 0 < left < right < 1 (fractions of the cell length)")
    if eps < 0:
        raise _err("interface", "epsilon", "must be >= 0")
    on_iface = _choice("interface", "on_interface", i["on_interface"], ("error", "midpoint"))

    disc = _choice("solver", "discretization", s["discretization"], ("TD", "PCD", "DGO"))
    scheme = _choice("solver", "scheme", s["scheme"] or ("FD" if dim == 1 else "AFD"), SCHEMES_3D)
    try:
        pair = SchemePair.parse(scheme, s["pair"])
        if disc != "DGO":
            pair.validate(dim)
    except InvalidInputError as exc:
        raise _err("solver", "scheme/pair", str(exc)) from None
    medium = s["medium"] or ("mean" if dim == 1 else "inclusion")
    _check_medium(medium, dim)
    tol = _floats("solver", "tol", s["tol"], 1)[0]
    if tol < 0:
        raise _err("solver", "tol", "must be >= 0")
    tol_mode = _choice("solver", "tol_mode", s["tol_mode"], ("absolute", "relative"))
    maxit = _ints("solver", "maxit", s["maxit"], 1)[0]
    if maxit < 1:
        raise _err("solver", "maxit", "must be >= 1")
    m_trunc = None
    if s["m_trunc"]:
        m_trunc = _per_axis(_ints("solver", "m_trunc", s["m_trunc"]), dim, "solver", "m_trunc")
        if any(v < 1 for v in m_trunc):
            raise _err("solver", "m_trunc", "must be >= 1")
    polarization = _bool("solver", "polarization", s["polarization"])
    dgo_weight = _choice("solver", "dgo_weight", s["dgo_weight"], ("sinc", "sinc2"))
    strict_r = _bool("solver", "strict_r", s["strict_r"])

    ncomp = 1 if dim == 1 else 6
    if ld["Ebar"]:
        Ebar = _floats("load", "Ebar", ld["Ebar"], ncomp)
    else:
        Ebar = (1.0,) if dim == 1 else (0.0, 0.0, 0.0, 0.0, 0.0, 1.0)
    eig = None
    if ld["eigenstrain"] != "none":
        if not ld["eigenstrain"].startswith("uniform:"):
            raise _err("load", "eigenstrain", "must be 'none' or 'uniform:<values>'")
        eig = _floats("load", "eigenstrain", ld["eigenstrain"].split(":", 1)[1], ncomp)

    flds = tuple(v.strip() for v in o["fields"].split(",") if v.strip())
    for f in flds:
        _choice("output", "fields", f, ("strain", "stress", "displacement"))
    trace = _bool("output", "trace", o["trace"])
    full_volume = _bool("output", "full_volume", o["full_volume"])

    algs = tuple(Algorithm.parse(a) for a in raw["compare"]["algorithms"].split(",") if a.strip())
    for a in algs:
        if a.discretization != "DGO":
            try:
                SchemePair.parse(a.scheme, a.pair).validate(dim)
            except InvalidInputError as exc:
                raise _err("compare", "algorithms", f"{a.label()}: {exc}") from None
    m_list = _ints("gibbs", "m_list", raw["gibbs"]["m_list"])
    if not m_list or any(v < 1 for v in m_list):
        raise _err("gibbs", "m_list", "need positive integers")
    points = _ints("gibbs", "points", raw["gibbs"]["points"], 1)[0]
    if points < 2:
        raise _err("gibbs", "points", "must be >= 2")

    return RunConfig(dim, counts, lengths, C_M, contrast, lambda_M, mu_M, left, right, eps,
                     on_iface, disc, scheme, s["pair"], medium, tol, tol_mode, maxit, m_trunc,
                     polarization, dgo_weight, strict_r, Ebar, eig, flds, trace, full_volume,
                     algs, m_list, points)


def _check_medium(rule: str, dim: int) -> None:
    if rule in MEDIUM_RULES:
        return
    if rule.startswith("explicit:"):
        vals = _floats("solver", "medium", rule.split(":", 1)[1])
        if len(vals) != (1 if dim == 1 else 2):
            raise _err("solver", "medium", f"explicit medium needs {1 if dim == 1 else 2} value(s)")
        if dim == 1 and vals[0] <= 0:
            raise _err("solver", "medium", "C_H must be positive")
        if dim == 3 and (vals[0] < 0 or vals[1] <= 0):
            raise _err("solver", "medium", "need lambda_H >= 0 and mu_H > 0")
        return
    raise _err("solver", "medium", f"must be mean, inclusion, stiffest or explicit:<values>, got {rule!r}")


def load_config(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text, str(path))


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (tuple, list)):
        return ",".join(_fmt(x) for x in v)
    return str(v)


def dump_config(cfg: RunConfig) -> str:
    """Canonical INI text; parses back to an equal :class:`RunConfig`."""
    vals = {f.name: getattr(cfg, f.name) for f in fields(cfg)}
    out = {
        "problem": {"dim": vals["dim"], "counts": vals["counts"], "lengths": vals["lengths"]},
        "material": {k: vals[k] for k in ("C_M", "contrast", "lambda_M", "mu_M")},
        "interface": {k: vals[k] for k in ("left", "right", "epsilon", "on_interface")},
        "solver": {k: vals[k] for k in ("discretization", "scheme", "pair", "medium", "tol",
                                        "tol_mode", "maxit", "polarization", "dgo_weight",
                                        "strict_r")},
        "load": {"Ebar": vals["Ebar"],
                 "eigenstrain": "none" if cfg.eigenstrain is None
                 else "uniform:" + _fmt(cfg.eigenstrain)},
        "output": {k: vals[k] for k in ("fields", "trace", "full_volume")},
        "compare": {"algorithms": ",".join(a.label() for a in cfg.algorithms)},
        "gibbs": {"m_list": vals["m_list"], "points": vals["points"]},
    }
    if cfg.m_trunc is not None:
        out["solver"]["m_trunc"] = cfg.m_trunc
    lines = []
    for section, items in out.items():
        lines.append(f"[{section}]")
        lines.extend(f"{k} = {_fmt(v)}" for k, v in items.items())
        lines.append("")
    return "\n".join(lines)

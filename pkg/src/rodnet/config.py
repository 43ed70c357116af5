"""Experiment configuration: a sectioned key = value file, parsed strictly.

Unknown sections or keys are errors, every numeric field is range-checked,
and :func:`echo` writes the effective configuration back out in a form
that parses to an equal :class:`ExperimentConfig`.
"""

import configparser
import re
from dataclasses import dataclass, field, fields

from .energy import WELL_PRESETS, BulkWellParams, MaterialParams
from .equilibrium import SolverSettings
from .errors import ConfigError, DomainError
from .phase_diagram import PROTOCOLS, GridSpec

COMMANDS = ("phase-diagram", "op-curve", "stress-curve", "energy-surface", "verify", "threshold")


def _floats(text):
    return tuple(float(x) for x in text.replace(",", " ").split())


def _bool(text):
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


@dataclass(frozen=True)
class SweepSpec:
    aa_list: tuple = (0.01, 0.1, 0.5, 5.0, 20.0, 80.0)
    chi_list: tuple = ()
    rho_min: float = 0.1
    rho_max: float = 3.0
    lam_min: float = 1.0
    lam_max: float = 2.5
    n_points: int = 59
    protocol: str = "expansion"


@dataclass(frozen=True)
class SurfaceSpec:
    s_min: float = -0.49
    s_max: float = 0.99
    n_s: int = 75
    rho_min: float = 0.25
    rho_max: float = 3.0
    n_rho: int = 56


@dataclass(frozen=True)
class VerifySpec:
    samples: int = 10_000
    paths: int = 100


@dataclass(frozen=True)
class GridBlock:
    spec: GridSpec = field(default_factory=GridSpec)
    n_rho: int = 200
    n_aa: int = 200
    protocol: str = "plane"


@dataclass(frozen=True)
class ExperimentConfig:
    command: str
    material: MaterialParams = field(default_factory=MaterialParams)
    solver: SolverSettings = field(default_factory=SolverSettings)
    grid: GridBlock = field(default_factory=GridBlock)
    sweep: SweepSpec = field(default_factory=SweepSpec)
    surface: SurfaceSpec = field(default_factory=SurfaceSpec)
    verify: VerifySpec = field(default_factory=VerifySpec)
    out: str = "out"
    seed: int = 0
    threads: int = 1
    strict: bool = False


def _pos(x):
    return x > 0


def _nonneg(x):
    return x >= 0


def _open_s(x):
    return -0.5 < x < 1.0


# key -> (parser, check, message)
SCHEMA = {
    "run": {
        "command": (str, lambda v: v in COMMANDS, f"one of {COMMANDS}"),
        "out": (str, lambda v: bool(v.strip()), "non-empty"),
        "seed": (int, _nonneg, ">= 0"),
        "threads": (int, lambda v: v >= 1, ">= 1"),
        "strict": (_bool, None, None),
    },
    "material": {
        "rho0": (float, _pos, "> 0"),
        "sigma_x0": (float, _nonneg, ">= 0"),
        "A_a": (float, _pos, "> 0"),
        "chi": (float, _pos, "> 0"),
        "RT": (float, _pos, "> 0"),
        "a0": (float, _pos, "> 0"),
        "alpha_mode": (str, lambda v: v in ("derived", "constant"), "derived or constant"),
        "alpha_value": (float, None, None),
    },
    "wells": {
        "preset": (str, lambda v: v in WELL_PRESETS, f"one of {tuple(WELL_PRESETS)}"),
        "s_i": (float, _open_s, "in (-1/2, 1)"),
        "z_i": (float, _pos, "> 0"),
        "eta_i": (float, _pos, "> 0"),
        "s_n": (float, _open_s, "in (-1/2, 1)"),
        "z_n": (float, _pos, "> 0"),
        "rho_n": (float, _pos, "> 0"),
        "eta_n": (float, _pos, "> 0"),
    },
    "solver": {
        "n_grid": (int, lambda v: v >= 10, ">= 10"),
        "delta": (float, lambda v: 0 < v < 0.1, "in (0, 0.1)"),
        "split": (float, _open_s, "in (-1/2, 1)"),
        "zero_tol": (float, _pos, "> 0"),
        "jump": (float, _pos, "> 0"),
    },
    "grid": {
        "rho_min": (float, _pos, "> 0"),
        "rho_max": (float, _pos, "> 0"),
        "aa_min": (float, _pos, "> 0"),
        "aa_max": (float, _pos, "> 0"),
        "n_rho": (int, lambda v: v >= 1, ">= 1"),
        "n_aa": (int, lambda v: v >= 1, ">= 1"),
        "protocol": (str, lambda v: v in PROTOCOLS, f"one of {PROTOCOLS}"),
    },
    "sweep": {
        "aa_list": (_floats, lambda v: len(v) > 0 and all(x > 0 for x in v), "positive numbers"),
        "chi_list": (_floats, lambda v: all(x > 0 for x in v), "positive numbers"),
        "rho_min": (float, _pos, "> 0"),
        "rho_max": (float, _pos, "> 0"),
        "lam_min": (float, _pos, "> 0"),
        "lam_max": (float, _pos, "> 0"),
        "n_points": (int, lambda v: v >= 2, ">= 2"),
        "protocol": (str, lambda v: v in PROTOCOLS, f"one of {PROTOCOLS}"),
    },
    "surface": {
        "s_min": (float, _open_s, "in (-1/2, 1)"),
        "s_max": (float, _open_s, "in (-1/2, 1)"),
        "n_s": (int, lambda v: v >= 2, ">= 2"),
        "rho_min": (float, _pos, "> 0"),
        "rho_max": (float, _pos, "> 0"),
        "n_rho": (int, lambda v: v >= 2, ">= 2"),
    },
    "verify": {
        "samples": (int, lambda v: v >= 1, ">= 1"),
        "paths": (int, lambda v: v >= 1, ">= 1"),
    },
}


def _line_of(text, section, key=None):
    """Best-effort line number of a section header or of a key inside it."""
    cur = None
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        m = re.match(r"^\[([^\]]+)\]", line)
        if m:
            cur = m.group(1).strip()
            if key is None and cur == section:
                return no
            continue
        if cur == section and key is not None:
            k = re.split(r"[=:]", line, maxsplit=1)[0].strip()
            if k == key:
                return no
    return None


def parse_config(text):
    """Parse and validate configuration text into an ExperimentConfig."""
    cp = configparser.ConfigParser(interpolation=None, strict=True,
                                   inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigError("key outside of any [section]", line=exc.lineno) from exc
    except configparser.ParsingError as exc:
        line = exc.errors[0][0] if exc.errors else None
        raise ConfigError("syntax error", line=line) from exc
    except (configparser.DuplicateOptionError, configparser.DuplicateSectionError) as exc:
        raise ConfigError(str(exc).split(":")[-1].strip() or "duplicate entry",
                          line=getattr(exc, "lineno", None)) from exc

    vals = {}
    for sec in cp.sections():
        if sec not in SCHEMA:
            raise ConfigError(f"unknown section [{sec}]", line=_line_of(text, sec))
        vals[sec] = {}
        for key, raw in cp.items(sec):
            line = _line_of(text, sec, key)
            if key not in SCHEMA[sec]:
                raise ConfigError(f"unknown key in [{sec}]", field=key, line=line)
            conv, check, msg = SCHEMA[sec][key]
            try:
                v = conv(raw.strip())
            except ValueError as exc:
                raise ConfigError(f"cannot parse {raw.strip()!r}", field=key, line=line) from exc
            if check is not None and not check(v):
                raise ConfigError(f"value {raw.strip()!r} out of range, expected {msg}",
                                  field=key, line=line)
            vals[sec][key] = v
    if "command" not in vals.get("run", {}):
        raise ConfigError("missing [run] command", field="command")
    try:
        return _build(vals)
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc


def _build(vals):
    run = vals.get("run", {})
    w = dict(vals.get("wells", {}))
    if "z_n" in w and "rho_n" in w:
        raise ConfigError("give either z_n or rho_n, not both", field="rho_n")
    mat = vals.get("material", {})
    rho0 = mat.get("rho0", 1.0)
    base = WELL_PRESETS[w.pop("preset", "dense")]
    if "rho_n" in w:
        w["z_n"] = rho0 / w.pop("rho_n")
    kw = {f.name: getattr(base, f.name) for f in fields(BulkWellParams)}
    kw.update(w)
    wells = BulkWellParams(**kw)
    material = MaterialParams(**mat, wells=wells)
    solver = SolverSettings(**vals.get("solver", {}))
    g = dict(vals.get("grid", {}))
    n_rho, n_aa = g.pop("n_rho", 200), g.pop("n_aa", 200)
    protocol = g.pop("protocol", "plane")
    gd = GridSpec()
    spec = GridSpec.with_counts(g.get("rho_min", gd.rho_min), g.get("rho_max", gd.rho_max), n_rho,
                                g.get("aa_min", gd.aa_min), g.get("aa_max", gd.aa_max), n_aa)
    sweep = SweepSpec(**vals.get("sweep", {}))
    if sweep.rho_min >= sweep.rho_max:
        raise ConfigError("need rho_min < rho_max", field="rho_min")
    if sweep.lam_min >= sweep.lam_max:
        raise ConfigError("need lam_min < lam_max", field="lam_min")
    surface = SurfaceSpec(**vals.get("surface", {}))
    return ExperimentConfig(command=run["command"], material=material, solver=solver,
                            grid=GridBlock(spec, n_rho, n_aa, protocol), sweep=sweep,
                            surface=surface, verify=VerifySpec(**vals.get("verify", {})),
                            out=run.get("out", "out"), seed=run.get("seed", 0),
                            threads=run.get("threads", 1), strict=run.get("strict", False))


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def _v(x):
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x)
    if isinstance(x, tuple):
        return ", ".join(repr(float(v)) for v in x)
    return str(x)


def echo(cfg):
    """Effective configuration as text; parse_config(echo(cfg)) == cfg."""
    m, wl, s, g = cfg.material, cfg.material.wells, cfg.solver, cfg.grid
    blocks = [
        ("run", [("command", cfg.command), ("out", cfg.out), ("seed", cfg.seed),
                 ("threads", cfg.threads), ("strict", cfg.strict)]),
        ("material", [(k, getattr(m, k)) for k in ("rho0", "sigma_x0", "A_a", "chi", "RT", "a0",
                                                    "alpha_mode", "alpha_value")]),
        ("wells", [(k, getattr(wl, k)) for k in ("s_i", "z_i", "eta_i", "s_n", "z_n", "eta_n")]),
        ("solver", [(k, getattr(s, k)) for k in ("n_grid", "delta", "split", "zero_tol", "jump")
                    if getattr(s, k) is not None]),
        ("grid", [("rho_min", g.spec.rho_min), ("rho_max", g.spec.rho_max),
                  ("aa_min", g.spec.aa_min), ("aa_max", g.spec.aa_max),
                  ("n_rho", g.n_rho), ("n_aa", g.n_aa), ("protocol", g.protocol)]),
        ("sweep", [(f.name, getattr(cfg.sweep, f.name)) for f in fields(SweepSpec)]),
        ("surface", [(f.name, getattr(cfg.surface, f.name)) for f in fields(SurfaceSpec)]),
        ("verify", [(f.name, getattr(cfg.verify, f.name)) for f in fields(VerifySpec)]),
    ]
    out = []
    for name, items in blocks:
        out.append(f"[{name}]")
        for k, v in items:
            out.append(f"{k} = {_v(v)}")
        out.append("")
    return "\n".join(out)

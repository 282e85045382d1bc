"""TOML run configuration: parsing, defaults and validation.

A config has the sections ``[system]``, ``[drive]``, ``[integrator]``,
``[sweep]`` and ``[output]``; every key is optional. Unknown keys are
rejected with a :class:`ConfigError` naming the dotted key path. A
``metadata.json`` written by a previous run is accepted as well and
reproduces that run.
"""

import copy
import json
import math
from dataclasses import dataclass
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .dielectric import GOLD_TABLE_FILE
from .errors import ConfigError
from .model import BASIS_LABELS, DriveSpec, SystemParams, resonant_delta_energy
from .sweep import AXIS_NAMES, METRICS, AxisSpec, SweepSpec

__all__ = ["RunConfig", "parse_config", "load_config_dict", "resolve", "DEFAULTS"]

NUMBER = "number"
COMPLEX = "complex"

DEFAULTS = {
    "system": {
        "omega1": 2.5,
        "omega2": 2.5,
        "mu1": 2.2,
        "mu2": 2.2,
        "R1": 9.0,
        "R2": 9.0,
        "alpha": 2.0,
        "eps_b": 1.0,
        "eps1": 6.0,
        "eps2": 6.0,
        "s_alpha": 2.0,
        "T1": 0.3,
        "T2": 0.3,
        "tau1": 0.8,
        "tau2": 0.8,
        "gamma_em": None,
        "gamma": None,
        "conjugate_gamma": True,
        "initial_state": "gg",
        "dielectric_table": None,
    },
    "drive": {
        "E0": 0.0,
        "mode": "cw",
        "omega": None,
        "detuning": None,
        "detuning_delta": None,
        "t0": None,
        "tp": None,
        "t_off": None,
    },
    "integrator": {
        "rel_tol": 1e-8,
        "abs_tol": 1e-10,
        "sample_dt": 0.05,
        "t_start": 0.0,
        "horizon": None,
        "backend": "auto",
    },
    "sweep": {
        "metric": "max_eof",
        "final_time": None,
        "workers": 1,
        "axes": [],
    },
    "output": {
        "dir": "out",
        "trajectory_csv": "trajectory.csv",
        "sweep_csv": "sweep.csv",
        "metadata_json": "metadata.json",
    },
}

# shorthands that set both dots at once
ALIASES = {"mu": ("mu1", "mu2"), "R": ("R1", "R2")}

TYPES = {
    "system": {
        **{k: NUMBER for k in ("omega1", "omega2", "mu1", "mu2", "R1", "R2", "alpha", "s_alpha",
                              "T1", "T2", "tau1", "tau2", "gamma_em", "mu", "R")},
        "eps_b": COMPLEX, "eps1": COMPLEX, "eps2": COMPLEX, "gamma": COMPLEX,
        "conjugate_gamma": bool, "initial_state": str, "dielectric_table": str,
    },
    "drive": {
        "E0": NUMBER, "mode": str, "omega": NUMBER, "detuning": NUMBER, "detuning_delta": NUMBER,
        "t0": NUMBER, "tp": NUMBER, "t_off": NUMBER,
    },
    "integrator": {
        "rel_tol": NUMBER, "abs_tol": NUMBER, "sample_dt": NUMBER, "t_start": NUMBER,
        "horizon": NUMBER, "backend": str,
    },
    "sweep": {"metric": str, "final_time": NUMBER, "workers": int, "axes": list},
    "output": {"dir": str, "trajectory_csv": str, "sweep_csv": str, "metadata_json": str},
}

AXIS_KEYS = {"name": str, "min": NUMBER, "max": NUMBER, "steps": int, "scale": str, "unit": str}

POSITIVE = {
    "system": ("omega1", "omega2", "mu1", "mu2", "alpha", "T1", "T2", "tau1", "tau2"),
    "drive": ("omega", "tp"),
    "integrator": ("rel_tol", "abs_tol", "sample_dt", "horizon"),
    "sweep": ("final_time", "workers"),
}


@dataclass(frozen=True, eq=False)
class RunConfig:
    params: SystemParams
    table_path: Path
    rel_tol: float
    abs_tol: float
    sample_dt: float
    t_start: float
    horizon: float | None
    backend: str
    sweep: SweepSpec | None
    workers: int
    output_dir: Path
    trajectory_csv: str
    sweep_csv: str
    metadata_json: str
    resolved: dict

    @property
    def t_span(self):
        from .dynamics import default_horizon

        h = self.horizon if self.horizon is not None else default_horizon(self.params.drive)
        return (self.t_start, self.t_start + h)


def _check_type(key, value, kind):
    if value is None:
        return value
    if kind is NUMBER:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(key, f"expected a number, got {type(value).__name__}")
        if not math.isfinite(value):
            raise ConfigError(key, "must be finite")
        return float(value)
    if kind is COMPLEX:
        if isinstance(value, list):
            if len(value) != 2 or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in value):
                raise ConfigError(key, "complex values are written [re, im]")
            return [float(value[0]), float(value[1])]
        return _check_type(key, value, NUMBER)
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(key, f"expected an integer, got {type(value).__name__}")
        return value
    if not isinstance(value, kind):
        raise ConfigError(key, f"expected {kind.__name__}, got {type(value).__name__}")
    return value


def _as_complex(v):
    if v is None:
        return None
    if isinstance(v, list):
        return complex(v[0], v[1])
    return v


def load_config_dict(path):
    """Raw mapping from a TOML config or a metadata JSON."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError("<file>", f"config file {path} not found")
    try:
        if path.suffix.lower() == ".json":
            data = json.loads(path.read_text(encoding="utf-8"))
            data = data.get("config", data)
        else:
            with path.open("rb") as fh:
                data = tomllib.load(fh)
    except (tomllib.TOMLDecodeError, json.JSONDecodeError) as exc:
        raise ConfigError("<file>", f"cannot parse {path}: {exc}") from None
    return data


def resolve(raw, base_dir="."):
    """Validate ``raw`` and return the fully defaulted mapping."""
    if not isinstance(raw, dict):
        raise ConfigError("<root>", "config must be a table")
    cfg = copy.deepcopy(DEFAULTS)
    for section, body in raw.items():
        if section not in DEFAULTS:
            raise ConfigError(section, "unknown section")
        if not isinstance(body, dict):
            raise ConfigError(section, "must be a table")
        for key, value in body.items():
            path = f"{section}.{key}"
            if key not in TYPES[section]:
                raise ConfigError(path, "unknown key")
            value = _check_type(path, value, TYPES[section][key])
            if key in ALIASES and section == "system":
                for target in ALIASES[key]:
                    cfg[section][target] = value
            else:
                cfg[section][key] = value

    for section, keys in POSITIVE.items():
        for key in keys:
            v = cfg[section][key]
            if v is not None and not v > 0:
                raise ConfigError(f"{section}.{key}", "must be > 0")

    s, d = cfg["system"], cfg["drive"]
    if not (s["R1"] > s["alpha"] and s["R2"] > s["alpha"]):
        raise ConfigError("system.R1" if s["R1"] <= s["alpha"] else "system.R2", "must exceed system.alpha")
    if s["s_alpha"] not in (2.0, -1.0):
        raise ConfigError("system.s_alpha", "must be 2 (parallel) or -1 (perpendicular)")
    if s["gamma_em"] is not None and s["gamma_em"] < 0:
        raise ConfigError("system.gamma_em", "must be >= 0")
    for key in ("eps_b", "eps1", "eps2"):
        if not complex(_as_complex(s[key])).real > 0:
            raise ConfigError(f"system.{key}", "real part must be > 0")
    if s["initial_state"] not in BASIS_LABELS:
        raise ConfigError("system.initial_state", f"must be one of {BASIS_LABELS}")
    if s["dielectric_table"] is None:
        s["dielectric_table"] = f"builtin:{GOLD_TABLE_FILE}"
    elif not s["dielectric_table"].startswith("builtin:"):
        p = Path(s["dielectric_table"])
        if not p.is_absolute():
            p = (Path(base_dir) / p).resolve()
        if not p.is_file():
            raise ConfigError("system.dielectric_table", f"file {p} not found")
        s["dielectric_table"] = str(p)

    if d["E0"] < 0:
        raise ConfigError("drive.E0", "must be >= 0")
    if d["mode"] not in ("cw", "sech"):
        raise ConfigError("drive.mode", "must be 'cw' or 'sech'")
    if d["mode"] == "cw":
        for key in ("t0", "tp"):
            if d[key] is not None:
                raise ConfigError(f"drive.{key}", "only valid for a sech pulse (drive.mode = 'sech')")
    else:
        d["t0"] = 22.5 if d["t0"] is None else d["t0"]
        d["tp"] = 3.0 if d["tp"] is None else d["tp"]
    given = [k for k in ("omega", "detuning", "detuning_delta") if d[k] is not None]
    if len(given) > 1:
        raise ConfigError(f"drive.{given[1]}", f"conflicts with drive.{given[0]}")

    if cfg["integrator"]["backend"] not in ("auto", "compiled", "python"):
        raise ConfigError("integrator.backend", "must be 'auto', 'compiled' or 'python'")

    sw = cfg["sweep"]
    if sw["metric"] not in METRICS:
        raise ConfigError("sweep.metric", f"must be one of {METRICS}")
    axes = []
    for i, axis in enumerate(sw["axes"]):
        prefix = f"sweep.axes[{i}]"
        if not isinstance(axis, dict):
            raise ConfigError(prefix, "must be a table")
        for key in axis:
            if key not in AXIS_KEYS:
                raise ConfigError(f"{prefix}.{key}", "unknown key")
        for key in ("name", "min", "max", "steps"):
            if key not in axis:
                raise ConfigError(f"{prefix}.{key}", "required")
        entry = {"scale": "linear", "unit": "ev"}
        for key, value in axis.items():
            entry[key] = _check_type(f"{prefix}.{key}", value, AXIS_KEYS[key])
        if entry["name"] not in AXIS_NAMES:
            raise ConfigError(f"{prefix}.name", f"must be one of {AXIS_NAMES}")
        try:
            AxisSpec(**entry)
        except ValueError as exc:
            raise ConfigError(prefix, str(exc)) from None
        axes.append(entry)
    if len(axes) > 2:
        raise ConfigError("sweep.axes", "at most two axes")
    sw["axes"] = axes
    return cfg


def _system_params(cfg):
    s, d = cfg["system"], cfg["drive"]
    drive = DriveSpec(E0=d["E0"], omega=s["omega1"], mode=d["mode"], t0=d["t0"], tp=d["tp"], t_off=d["t_off"])
    try:
        params = SystemParams(
            omega1=s["omega1"], omega2=s["omega2"],
            mu1=s["mu1"], mu2=s["mu2"],
            R1=s["R1"], R2=s["R2"], alpha=s["alpha"],
            eps_b=_as_complex(s["eps_b"]), eps1=_as_complex(s["eps1"]), eps2=_as_complex(s["eps2"]),
            s_alpha=s["s_alpha"],
            T1=s["T1"], T2=s["T2"], tau1=s["tau1"], tau2=s["tau2"],
            drive=drive, rho0=s["initial_state"],
            gamma_em=s["gamma_em"], gamma=_as_complex(s["gamma"]),
            conjugate_gamma=s["conjugate_gamma"],
        )
        if d["omega"] is not None:
            omega = d["omega"]
        elif d["detuning"] is not None:
            omega = s["omega1"] + d["detuning"]
        elif d["detuning_delta"] is not None:
            omega = s["omega1"] + d["detuning_delta"] * resonant_delta_energy(params)
        else:
            omega = s["omega1"]
        return params.replace(drive=DriveSpec(
            E0=d["E0"], omega=omega, mode=d["mode"], t0=d["t0"], tp=d["tp"], t_off=d["t_off"]))
    except ValueError as exc:
        raise ConfigError("system", str(exc)) from None


def parse_config(path, overrides=None):
    """Read, default and validate a run configuration.

    ``overrides`` is a nested mapping merged over the file before validation
    (used for command-line flags).
    """
    path = Path(path)
    raw = load_config_dict(path)
    if overrides:
        raw = copy.deepcopy(raw)
        for section, body in overrides.items():
            raw.setdefault(section, {}).update(body)
    cfg = resolve(raw, base_dir=path.parent)
    params = _system_params(cfg)

    integ, sw, out = cfg["integrator"], cfg["sweep"], cfg["output"]
    backend = None if integ["backend"] == "auto" else integ["backend"]
    sweep = None
    if sw["axes"]:
        try:
            sweep = SweepSpec(
                base=params,
                axes=tuple(AxisSpec(**a) for a in sw["axes"]),
                metric=sw["metric"],
                final_time=sw["final_time"],
                horizon=integ["horizon"],
                sample_dt=integ["sample_dt"],
                rel_tol=integ["rel_tol"],
                abs_tol=integ["abs_tol"],
                backend=backend,
            )
        except ValueError as exc:
            raise ConfigError("sweep", str(exc)) from None

    return RunConfig(
        params=params,
        table_path=cfg["system"]["dielectric_table"],
        rel_tol=integ["rel_tol"],
        abs_tol=integ["abs_tol"],
        sample_dt=integ["sample_dt"],
        t_start=integ["t_start"],
        horizon=integ["horizon"],
        backend=backend,
        sweep=sweep,
        workers=sw["workers"],
        output_dir=Path(out["dir"]),
        trajectory_csv=out["trajectory_csv"],
        sweep_csv=out["sweep_csv"],
        metadata_json=out["metadata_json"],
        resolved=cfg,
    )

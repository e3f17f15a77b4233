"""YAML run configuration: schema, defaults and object construction.

Every section is optional except ``gas`` and ``far_field``.  Unknown keys
are rejected; the resolved configuration (all defaults explicit) is what the
CLI writes next to its artifacts, and feeding it back reproduces the run.
"""
from __future__ import annotations

import copy
import math
from dataclasses import dataclass
from pathlib import Path

import yaml

from . import eos, stationary
from .errors import AdmissibilityError, ConfigError
from .harness import SHAPES, PerturbationSpec
from .transient import FAR_FIELD_MODES, SolverConfig

REQUIRED = object()

SCHEMA = {
    "gas": {"closure": "ideal-polytropic", "params": {}, "v_ref": 1.0, "theta_ref": 1.0},
    "far_field": {"v_plus": REQUIRED, "theta_plus": REQUIRED, "u_plus": None, "mach_target": None},
    "physics": {"mu": 1.0, "kappa": 1.0},
    "stationary": {"y10": 0.1, "eps": 0.05, "L": None, "N": 4096, "method": "full",
                   "delta0": stationary.DELTA0, "weights": [1.0, 1.0],
                   "sweep_factors": [1.5, 1.25, 1.0, 0.75, 0.5]},
    "transient": {"cfl": 0.4, "t_end": 150.0, "stride": 500, "far_field": "profile",
                  "snapshots": 5, "backend": None},
    "perturbation": {"shape": "gaussian-bump", "a_rho": 0.01, "a_u": 0.01, "a_theta": 0.01,
                     "x_c": 8.0, "width": 1.5, "seed": None},
    "sweep": {"amplitudes": [0.005, 0.01, 0.02], "mach": [1.0]},
    "output": {"dir": "out"},
}

# keys whose value is a free-form mapping
FREE = {("gas", "params")}


def _merge(schema, given, path=()):
    if given is None:
        given = {}
    if not isinstance(given, dict):
        raise ConfigError(f"section {'.'.join(path) or '<root>'} must be a mapping")
    unknown = sorted(set(given) - set(schema))
    if unknown:
        raise ConfigError(f"unknown key(s) {unknown} in {'.'.join(path) or '<root>'}")
    out = {}
    for key, default in schema.items():
        p = path + (key,)
        if isinstance(default, dict) and p not in FREE:
            out[key] = _merge(default, given.get(key), p)
        elif key in given:
            out[key] = copy.deepcopy(given[key])
        elif default is REQUIRED:
            raise ConfigError(f"missing required key {'.'.join(p)}")
        else:
            out[key] = copy.deepcopy(default)
    return out


def _num(d, key, path, positive=False, allow_none=False, integer=False):
    x = d[key]
    if x is None and allow_none:
        return
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ConfigError(f"{path}.{key} must be a number, got {x!r}")
    if integer and int(x) != x:
        raise ConfigError(f"{path}.{key} must be an integer")
    if not math.isfinite(x):
        raise ConfigError(f"{path}.{key} must be finite")
    if positive and not x > 0:
        raise ConfigError(f"{path}.{key} must be positive, got {x}")
    d[key] = int(x) if integer else float(x)


def _validate(c):
    g = c["gas"]
    if g["closure"] not in eos.registered_closures():
        raise ConfigError(f"unknown closure {g['closure']!r}; registered: {eos.registered_closures()}")
    if not isinstance(g["params"], dict):
        raise ConfigError("gas.params must be a mapping")
    _num(g, "v_ref", "gas", positive=True)
    _num(g, "theta_ref", "gas", positive=True)
    f = c["far_field"]
    _num(f, "v_plus", "far_field", positive=True)
    _num(f, "theta_plus", "far_field", positive=True)
    _num(f, "u_plus", "far_field", allow_none=True)
    _num(f, "mach_target", "far_field", positive=True, allow_none=True)
    if (f["u_plus"] is None) == (f["mach_target"] is None):
        raise ConfigError("far_field needs exactly one of u_plus and mach_target")
    if f["u_plus"] is not None and f["u_plus"] >= 0:
        raise AdmissibilityError(f"far_field.u_plus = {f['u_plus']}: {stationary.NONEXISTENCE}")
    for k in ("mu", "kappa"):
        _num(c["physics"], k, "physics", positive=True)
    s = c["stationary"]
    _num(s, "y10", "stationary")
    _num(s, "eps", "stationary")
    _num(s, "L", "stationary", positive=True, allow_none=True)
    _num(s, "N", "stationary", positive=True, integer=True)
    _num(s, "delta0", "stationary", positive=True)
    if s["method"] not in ("full", "reduced"):
        raise ConfigError("stationary.method must be 'full' or 'reduced'")
    s["weights"] = [float(w) for w in s["weights"]]
    s["sweep_factors"] = [float(w) for w in s["sweep_factors"]]
    t = c["transient"]
    _num(t, "cfl", "transient", positive=True)
    _num(t, "t_end", "transient")
    _num(t, "stride", "transient", positive=True, integer=True)
    _num(t, "snapshots", "transient", integer=True)
    if t["far_field"] not in FAR_FIELD_MODES:
        raise ConfigError(f"transient.far_field must be one of {FAR_FIELD_MODES}")
    if t["backend"] not in (None, "python", "cython"):
        raise ConfigError("transient.backend must be null, 'python' or 'cython'")
    p = c["perturbation"]
    if p["shape"] not in SHAPES:
        raise ConfigError(f"perturbation.shape must be one of {SHAPES}")
    for k in ("a_rho", "a_u", "a_theta"):
        _num(p, k, "perturbation")
    _num(p, "x_c", "perturbation")
    _num(p, "width", "perturbation", positive=True)
    _num(p, "seed", "perturbation", allow_none=True, integer=True)
    sw = c["sweep"]
    sw["amplitudes"] = [float(a) for a in sw["amplitudes"]]
    sw["mach"] = [float(m) for m in sw["mach"]]
    if any(m <= 0 for m in sw["mach"]):
        raise ConfigError("sweep.mach entries must be positive")
    c["output"]["dir"] = str(c["output"]["dir"])
    # builds the objects once so physically invalid input fails before any work
    RunConfig(c).far_field_spec()
    return c


@dataclass
class RunConfig:
    data: dict

    def model(self):
        g = self.data["gas"]
        params = dict(g["params"])
        if g["closure"] in ("ideal-polytropic", "power-law", "van-der-waals"):
            params.setdefault("v_ref", g["v_ref"])
            params.setdefault("theta_ref", g["theta_ref"])
        try:
            return eos.make_gas(g["closure"], **params)
        except TypeError as err:
            raise ConfigError(f"bad gas.params for {g['closure']!r}: {err}") from err

    def phys(self):
        ph = self.data["physics"]
        return eos.PhysicalParams(mu=ph["mu"], kappa=ph["kappa"])

    def far_field_spec(self, mach=None):
        f = self.data["far_field"]
        if mach is None and f["u_plus"] is not None:
            return stationary.FarFieldSpec(f["v_plus"], f["theta_plus"], f["u_plus"], self.model(),
                                           self.phys())
        m = mach if mach is not None else f["mach_target"]
        return stationary.FarFieldSpec.from_mach(self.model(), self.phys(), f["v_plus"],
                                                 f["theta_plus"], m)

    def solver_config(self):
        t = self.data["transient"]
        return SolverConfig(cfl=t["cfl"], t_end=t["t_end"], stride=t["stride"],
                            far_field=t["far_field"], phys=self.phys(), backend=t["backend"])

    def perturbation(self):
        p = self.data["perturbation"]
        return PerturbationSpec(p["shape"], p["a_rho"], p["a_u"], p["a_theta"], p["x_c"], p["width"])

    @property
    def out_dir(self):
        return Path(self.data["output"]["dir"])

    def dump(self):
        return yaml.safe_dump(self.data, sort_keys=True, default_flow_style=False)


def resolve(raw: dict, overrides: dict | None = None) -> RunConfig:
    c = _merge(SCHEMA, raw)
    for dotted, val in (overrides or {}).items():
        sec, key = dotted.split(".")
        c[sec][key] = val
    return RunConfig(_validate(c))


def parse_config(path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as err:
        raise ConfigError(f"cannot read config {path}: {err}") from err
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as err:
        raise ConfigError(f"malformed config {path}: {err}") from err
    return resolve(raw)

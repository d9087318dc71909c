"""Scan configuration: a key/value file with nested sections.

Standard INI syntax (configparser).  Every key is validated against the
schema below; unknown sections or keys are hard errors, because a silently
ignored misspelling would corrupt a scaling study.  Values are parsed as
comma-separated lists of literals where the schema says so.
"""

from __future__ import annotations

import configparser
import hashlib
from dataclasses import dataclass, field
from pathlib import Path

__all__ = ["ScanConfig", "load_config", "default_config_text", "config_hash"]

KNOWN_CHECKS = (
    "spray_identity",
    "position_gap",
    "velocity_gap",
    "distribution_gap",
    "mean_residual",
    "residual_decomposition",
    "cold_closure",
    "cold_limit",
)

_SCHEMA = {
    "run": {"name": str, "checks": "strlist", "out": str, "seed": int,
            "threads": int},
    "beam": {"rapidity": float, "direction": "floatlist",
             "alpha_ladder": "floatlist", "rapidity_ladder": "floatlist"},
    "times": {"grid": "floatlist"},
    "numerics": {"tolerance": float, "fiber_nodes_gap": int,
                 "fiber_nodes_fluid": int, "moment_mode": str,
                 "fd_step_factor": float},
    "probes": {"narrow_offset": float, "energy_offset": float,
               "tracer_offset_frac": float},
    "fits": {"alpha_fit_time": float, "energy_fit_time": float,
             "t_fit_alpha": float, "f_gap_fit_time": float,
             "identity_assert_alpha": float},
    "scenario.gap": {"name": str, "strength": float, "profile": str},
    "scenario.fluid": {"name": str, "strength": float, "profile": str},
    "regime": {"alpha_max": float, "energy_min": float,
               "theta_gap_warn": float, "adiabatic_warn": float},
}


@dataclass
class ScanConfig:
    name: str = "default"
    checks: tuple = KNOWN_CHECKS
    out: str = "runs/default"
    seed: int = 20240817
    threads: int = 1

    rapidity: float = 3.0
    direction: tuple = (1.0, 0.0, 0.0)
    alpha_ladder: tuple = (0.4, 0.2, 0.1, 0.05)
    rapidity_ladder: tuple = (1.5, 2.3, 3.0, 3.7)
    time_grid: tuple = (0.5, 1.0, 2.0, 4.0)

    tolerance: float = 1e-12
    fiber_nodes_gap: int = 25
    fiber_nodes_fluid: int = 17
    moment_mode: str = "transported"
    fd_step_factor: float = 0.25

    narrow_offset: float = 0.006
    energy_offset: float = 0.02
    tracer_offset_frac: float = 0.3

    alpha_fit_time: float = 2.0
    energy_fit_time: float = 1.0
    t_fit_alpha: float = 0.1
    f_gap_fit_time: float = 4.0
    identity_assert_alpha: float = 0.1

    gap_scenario: str = "uniform_b"
    gap_strength: float = 0.1
    gap_profile: str = "ball"
    fluid_scenario: str = "uniform_b"
    fluid_strength: float = 0.5
    fluid_profile: str = "two_lobe"

    alpha_max: float = 0.5
    energy_min: float = 2.0
    theta_gap_warn: float = 0.1
    adiabatic_warn: float = 0.1

    source_text: str = field(default="", repr=False)

    def validate(self):
        for name, ladder in (("alpha_ladder", self.alpha_ladder),
                             ("rapidity_ladder", self.rapidity_ladder),
                             ("time grid", self.time_grid)):
            vals = list(ladder)
            if not vals:
                raise ValueError(f"{name} must be nonempty")
            diffs = [b - a for a, b in zip(vals, vals[1:])]
            if any(d == 0 for d in diffs) or (any(d > 0 for d in diffs)
                                              and any(d < 0 for d in diffs)):
                raise ValueError(f"{name} must be strictly monotone")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.moment_mode not in ("transported", "frozen"):
            raise ValueError(f"unknown moment mode {self.moment_mode!r}")
        for c in self.checks:
            if c not in KNOWN_CHECKS:
                raise ValueError(
                    f"unknown check {c!r}; known: {', '.join(KNOWN_CHECKS)}")
        return self


def _parse_value(raw: str, kind):
    raw = raw.strip()
    if kind is str:
        return raw
    if kind is int:
        return int(raw)
    if kind is float:
        return float(raw)
    if kind == "floatlist":
        return tuple(float(v) for v in raw.split(",") if v.strip())
    if kind == "strlist":
        return tuple(v.strip() for v in raw.split(",") if v.strip())
    raise AssertionError(kind)


_FIELD_MAP = {
    ("run", "name"): "name", ("run", "checks"): "checks",
    ("run", "out"): "out", ("run", "seed"): "seed",
    ("run", "threads"): "threads",
    ("beam", "rapidity"): "rapidity", ("beam", "direction"): "direction",
    ("beam", "alpha_ladder"): "alpha_ladder",
    ("beam", "rapidity_ladder"): "rapidity_ladder",
    ("times", "grid"): "time_grid",
    ("numerics", "tolerance"): "tolerance",
    ("numerics", "fiber_nodes_gap"): "fiber_nodes_gap",
    ("numerics", "fiber_nodes_fluid"): "fiber_nodes_fluid",
    ("numerics", "moment_mode"): "moment_mode",
    ("numerics", "fd_step_factor"): "fd_step_factor",
    ("probes", "narrow_offset"): "narrow_offset",
    ("probes", "energy_offset"): "energy_offset",
    ("probes", "tracer_offset_frac"): "tracer_offset_frac",
    ("fits", "alpha_fit_time"): "alpha_fit_time",
    ("fits", "energy_fit_time"): "energy_fit_time",
    ("fits", "t_fit_alpha"): "t_fit_alpha",
    ("fits", "f_gap_fit_time"): "f_gap_fit_time",
    ("fits", "identity_assert_alpha"): "identity_assert_alpha",
    ("scenario.gap", "name"): "gap_scenario",
    ("scenario.gap", "strength"): "gap_strength",
    ("scenario.gap", "profile"): "gap_profile",
    ("scenario.fluid", "name"): "fluid_scenario",
    ("scenario.fluid", "strength"): "fluid_strength",
    ("scenario.fluid", "profile"): "fluid_profile",
    ("regime", "alpha_max"): "alpha_max",
    ("regime", "energy_min"): "energy_min",
    ("regime", "theta_gap_warn"): "theta_gap_warn",
    ("regime", "adiabatic_warn"): "adiabatic_warn",
}


def load_config(path: str | Path) -> ScanConfig:
    """Parse and validate a scan configuration file."""
    text = Path(path).read_text()
    parser = configparser.ConfigParser(strict=True)
    parser.read_string(text)
    cfg = ScanConfig(source_text=text)
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ValueError(
                f"unknown config section [{section}]; known: "
                f"{', '.join(sorted(_SCHEMA))}")
        for key, raw in parser[section].items():
            if key not in _SCHEMA[section]:
                raise ValueError(
                    f"unknown key {key!r} in [{section}]; known: "
                    f"{', '.join(sorted(_SCHEMA[section]))}")
            setattr(cfg, _FIELD_MAP[(section, key)],
                    _parse_value(raw, _SCHEMA[section][key]))
    return cfg.validate()


def config_hash(cfg: ScanConfig) -> str:
    """Hash of the scientific inputs; execution knobs (worker count, output
    location) and the raw text are excluded so runs compare by content."""
    skip = {"source_text", "threads", "out"}
    payload = repr(sorted(
        (k, v) for k, v in vars(cfg).items() if k not in skip)).encode()
    return hashlib.sha256(payload).hexdigest()[:16]


def default_config_text(smoke: bool = False) -> str:
    """Reference configuration (the documented schema)."""
    if smoke:
        return """\
[run]
name = smoke
checks = spray_identity, position_gap, velocity_gap, distribution_gap, mean_residual, residual_decomposition, cold_closure, cold_limit
out = runs/smoke

[beam]
rapidity = 3.0
alpha_ladder = 0.1
rapidity_ladder = 3.0

[times]
grid = 0.5, 1.0

[numerics]
tolerance = 1e-10
fiber_nodes_gap = 13
fiber_nodes_fluid = 13

[fits]
alpha_fit_time = 1.0
energy_fit_time = 1.0
t_fit_alpha = 0.1
f_gap_fit_time = 1.0
"""
    return """\
[run]
name = full
checks = spray_identity, position_gap, velocity_gap, distribution_gap, mean_residual, residual_decomposition, cold_closure, cold_limit
out = runs/full

[beam]
rapidity = 3.0
direction = 1, 0, 0
alpha_ladder = 0.4, 0.2, 0.1, 0.05
rapidity_ladder = 1.5, 2.3, 3.0, 3.7

[times]
grid = 0.5, 1.0, 2.0, 4.0

[numerics]
tolerance = 1e-12
fiber_nodes_gap = 25
fiber_nodes_fluid = 17
moment_mode = transported
fd_step_factor = 0.25

[probes]
narrow_offset = 0.006
energy_offset = 0.02
tracer_offset_frac = 0.3

[fits]
alpha_fit_time = 2.0
energy_fit_time = 1.0
t_fit_alpha = 0.1
f_gap_fit_time = 4.0
identity_assert_alpha = 0.1

[scenario.gap]
name = uniform_b
strength = 0.1
profile = ball

[scenario.fluid]
name = uniform_b
strength = 0.5
profile = two_lobe

[regime]
alpha_max = 0.5
energy_min = 2.0
theta_gap_warn = 0.1
adiabatic_warn = 0.1
"""

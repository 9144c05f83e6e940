"""Run configuration: INI-style ``key = value`` sections, overridable by CLI flags.

Recognised sections and keys (all optional except the cost block)::

    [cost]    alpha beta gamma t_star upsilon0 capacity demand
    [fd]      u w                      (default 1, 1; $/day)
    [grid]    dx x_min dt t_min t_max  (dx default L*/100)
    [solver]  cfl_factor days tol stride
    [initial] preset span departures   (span in units of L*)
    [run]     seed out svg
"""

import configparser
from dataclasses import dataclass, replace
import os
from pathlib import Path

from .cost_model import CostParams
from .equilibrium import spue_summary
from .exceptions import ParameterError
from .initial import PRESETS
from .lwr_core import FundamentalDiagram

COST_KEYS = {
    "alpha": "alpha",
    "beta": "beta",
    "gamma": "gamma",
    "t_star": "t_star",
    "upsilon0": "upsilon0",
    "capacity": "capacity",
    "demand": "demand_total",
}


@dataclass(frozen=True)
class RunConfig:
    params: CostParams
    u: float = 1.0
    w: float = 1.0
    dx: float = None
    x_min: float = None
    dt: float = None
    t_min: float = None
    t_max: float = None
    cfl_factor: float = 0.9
    days: float = 40.0
    tol: float = 1e-12
    stride: int = 100
    preset: str = "uniform"
    span: float = 3.0
    departures: str = None
    seed: int = 0
    out: str = None
    svg: bool = True

    def __post_init__(self):
        s = spue_summary(self.params)
        if self.dx is None:
            object.__setattr__(self, "dx", s.L_star / 100.0)
        if self.out is None:
            object.__setattr__(self, "out", os.environ.get("SPUE_OUT", "spue_out"))
        if not self.dx > 0:
            raise ParameterError("grid.dx must be > 0")
        if self.dt is not None and not self.dt > 0:
            raise ParameterError("grid.dt must be > 0")
        if not 0 < self.cfl_factor <= 1:
            raise ParameterError("solver.cfl_factor must lie in (0, 1]")
        if self.days < 0:
            raise ParameterError("solver.days must be >= 0")
        if self.tol is not None and self.tol < 0:
            raise ParameterError("solver.tol must be >= 0")
        if int(self.stride) != self.stride or self.stride < 1:
            raise ParameterError("solver.stride must be a positive integer")
        if self.preset not in PRESETS:
            raise ParameterError(f"initial.preset must be one of {', '.join(PRESETS)}")
        if not self.span > 0:
            raise ParameterError("initial.span must be > 0")
        if self.departures is not None and not Path(self.departures).is_file():
            raise ParameterError(f"departure file not found: {self.departures}")
        if self.seed < 0:
            raise ParameterError("run.seed must be a non-negative integer")
        self.fd  # validates u, w

    @property
    def fd(self):
        s = spue_summary(self.params)
        return FundamentalDiagram(self.u, self.w, s.kappa)

    def with_overrides(self, **kw):
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


def _num(section, key, cast=float):
    raw = section.get(key)
    if raw is None or raw.strip() == "":
        return None
    try:
        return cast(raw)
    except ValueError as exc:
        raise ParameterError(f"[{section.name}] {key} = {raw!r}: {exc}") from None


def _bool(section, key):
    raw = section.get(key)
    if raw is None or raw.strip() == "":
        return None
    try:
        return section.getboolean(key)
    except ValueError:
        raise ParameterError(f"[{section.name}] {key} = {raw!r} is not a boolean") from None


def parse_config(text, base_dir="."):
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ParameterError(f"malformed config: {exc}") from None
    if not cp.has_section("cost"):
        raise ParameterError("config needs a [cost] section")
    cost = cp["cost"]
    values = {}
    for key, field_name in COST_KEYS.items():
        v = _num(cost, key)
        if v is None:
            raise ParameterError(f"[cost] {key} is required")
        values[field_name] = v
    params = CostParams(**values)

    kw = {}
    schema = {
        "fd": {"u": float, "w": float},
        "grid": {"dx": float, "x_min": float, "dt": float, "t_min": float, "t_max": float},
        "solver": {"cfl_factor": float, "days": float, "tol": float, "stride": int},
        "initial": {"span": float},
        "run": {"seed": int},
    }
    for sec, keys in schema.items():
        if cp.has_section(sec):
            for key, cast in keys.items():
                v = _num(cp[sec], key, cast)
                if v is not None:
                    kw[key] = v
    if cp.has_section("initial"):
        ini = cp["initial"]
        if ini.get("preset"):
            kw["preset"] = ini.get("preset").strip()
        if ini.get("departures"):
            kw["departures"] = str(Path(base_dir) / ini.get("departures").strip())
    if cp.has_section("run"):
        if cp["run"].get("out"):
            kw["out"] = cp["run"].get("out").strip()
        svg = _bool(cp["run"], "svg")
        if svg is not None:
            kw["svg"] = svg
    return RunConfig(params, **kw)


def load_config(path):
    path = Path(path)
    if not path.is_file():
        raise ParameterError(f"config file not found: {path}")
    return parse_config(path.read_text(), base_dir=path.parent)


CANONICAL = """\
[cost]
alpha = 2
beta = 1
gamma = 1
t_star = 0
upsilon0 = 0
capacity = 1
demand = 2
"""


def default_config():
    return parse_config(CANONICAL)

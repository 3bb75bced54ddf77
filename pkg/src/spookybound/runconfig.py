"""INI run configuration: one section per module config, flat key = value pairs."""

from __future__ import annotations

import ast
import configparser
import hashlib
import math
import operator
from dataclasses import dataclass, field, fields
from pathlib import Path

from . import constants
from .errors import ConfigError
from .geo_relativity import SpacetimeEvent
from .timetag_sim import SourceConfig, StationConfig

def _pow(a, b):
    if abs(b) > 1024:
        raise ValueError
    return float(a) ** b


_OPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
        ast.Div: operator.truediv, ast.Pow: _pow, ast.USub: operator.neg, ast.UAdd: operator.pos}
_NAMES = {"pi": math.pi, "c": constants.C}


def parse_number(text: str, name: str) -> float:
    """A float literal or a small arithmetic expression in ``pi`` (e.g. ``pi/2``)."""

    def ev(node):
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return node.value
        if isinstance(node, ast.Name) and node.id in _NAMES:
            return _NAMES[node.id]
        if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.operand))
        raise ValueError
    try:
        value = float(ev(ast.parse(text.strip(), mode="eval").body))
    except (SyntaxError, ValueError, TypeError, ZeroDivisionError, OverflowError):
        raise ConfigError(name, f"not a number: {text!r}") from None
    if not math.isfinite(value):
        raise ConfigError(name, f"not finite: {text!r}")
    return value


def parse_list(text: str, name: str) -> list:
    return [parse_number(x, name) for x in text.split(",") if x.strip()]


@dataclass
class AnalysisConfig:
    window_ps: int = 3000
    T_s: float = constants.INTERVAL_T_S
    coarse_offset_bound_s: float = 100e-6
    n_windows: int | None = None
    span_s: float | None = None  # with n_windows: overlapping windows across this span


@dataclass
class BoundConfig:
    rho: float = constants.RHO
    beta: float = constants.BETA_CMB
    theta_rad: float = math.pi / 2
    T_s: float = constants.INTERVAL_T_S
    omega: float = constants.OMEGA_EARTH
    min_sigmas: float = 0.0


def default_beta_grid():
    import numpy as np
    grid = np.logspace(-6, math.log10(0.99), 46)
    return sorted(set(grid.tolist()) | {1e-3, 0.1, 0.5, 0.9})


def default_theta_grid():
    return [math.pi * k / 48 for k in range(49)]


@dataclass
class SweepConfig:
    rho: float = constants.RHO
    T_s: float = constants.INTERVAL_T_S
    omega: float = constants.OMEGA_EARTH
    beta_grid: list = field(default_factory=default_beta_grid)
    theta_grid: list = field(default_factory=default_theta_grid)


EVENT_NAMES = ("E", "a", "b", "A", "B")


@dataclass
class RunConfig:
    seed: int | None = None
    chunk_s: float = 100.0
    truth_pairs: bool = True
    source: SourceConfig = field(default_factory=SourceConfig)
    station_a: StationConfig = field(default_factory=StationConfig)
    station_b: StationConfig = field(default_factory=StationConfig)
    analysis: AnalysisConfig = field(default_factory=AnalysisConfig)
    bound: BoundConfig = field(default_factory=BoundConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    events: dict | None = None
    sha256: str = hashlib.sha256(b"").hexdigest()


def _convert(section, key, raw, default, annotation):
    name = f"{section}.{key}"
    if "bool" in str(annotation):
        low = raw.strip().lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ConfigError(name, f"not a boolean: {raw!r}")
    if "tuple" in str(annotation) or "list" in str(annotation):
        return tuple(parse_list(raw, name)) if "tuple" in str(annotation) else parse_list(raw, name)
    value = parse_number(raw, name)
    if "int" in str(annotation) and "float" not in str(annotation):
        if value != int(value):
            raise ConfigError(name, f"must be an integer: {raw!r}")
        return int(value)
    return value


def _build(cls, section, items):
    known = {f.name: f for f in fields(cls)}
    kwargs = {}
    for key, raw in items.items():
        if key not in known:
            raise ConfigError(f"{section}.{key}", "unknown key")
        f = known[key]
        kwargs[key] = _convert(section, key, raw, f.default, f.type)
    try:
        return cls(**kwargs)
    except ConfigError as exc:
        raise ConfigError(f"{section}.{exc.field}", str(exc).split(": ", 1)[1]) from None


def parse_event(text, name) -> SpacetimeEvent:
    vals = parse_list(text, name)
    if len(vals) == 2:
        return SpacetimeEvent.on_axis(vals[0], vals[1])
    if len(vals) == 4:
        return SpacetimeEvent(tuple(vals[:3]), vals[3])
    raise ConfigError(name, "expected 'x_m, t_s' or 'x_m, y_m, z_m, t_s'")


_SECTIONS = {"source": SourceConfig, "station_a": StationConfig, "station_b": StationConfig,
             "analysis": AnalysisConfig, "bound": BoundConfig, "sweep": SweepConfig}


def load_config(path=None) -> RunConfig:
    cfg = RunConfig()
    if path is None:
        return cfg
    data = Path(path).read_bytes()
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string(data.decode("utf-8"), source=str(path))
    except configparser.Error as exc:
        raise ConfigError("file", str(exc).splitlines()[0]) from None
    cfg.sha256 = hashlib.sha256(data).hexdigest()
    for section in cp.sections():
        items = dict(cp.items(section))
        if section == "run":
            for key, raw in items.items():
                if key == "seed":
                    cfg.seed = int(_convert("run", key, raw, 0, "int"))
                elif key == "chunk_s":
                    cfg.chunk_s = parse_number(raw, "run.chunk_s")
                elif key == "truth_pairs":
                    cfg.truth_pairs = _convert("run", key, raw, True, "bool")
                else:
                    raise ConfigError(f"run.{key}", "unknown key")
        elif section == "events":
            unknown = set(items) - set(EVENT_NAMES)
            if unknown:
                raise ConfigError(f"events.{sorted(unknown)[0]}", "unknown event")
            cfg.events = {k: parse_event(v, f"events.{k}") for k, v in items.items()}
        elif section in _SECTIONS:
            setattr(cfg, section, _build(_SECTIONS[section], section, items))
        else:
            raise ConfigError(section, "unknown section")
    return cfg


def require_events(cfg: RunConfig):
    if cfg.events is None:
        raise ConfigError("events", "section missing")
    for name in EVENT_NAMES:
        if name not in cfg.events:
            raise ConfigError(f"events.{name}", "missing event")
    return tuple(cfg.events[n] for n in EVENT_NAMES)

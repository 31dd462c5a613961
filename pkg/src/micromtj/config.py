"""Run configuration: nested dataclasses loaded from / saved to JSON.

Every key is optional; missing keys take the documented defaults and unknown
keys are rejected with their dotted path.
"""

from __future__ import annotations

import dataclasses
import itertools
import json
import types
import typing
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dynamics import Controller, RelaxCriteria
from .materials import MaterialParams, VcmaProfile
from .mesh import Mesh, RegionMask
from .protocol import WriteTiming
from .texture import Thresholds

SWEEP_PARAMETERS = ("Ku0", "D", "Vb", "beta", "J")
SWEEP_PROTOCOLS = ("relax", "write+", "write-", "write_both")


class ConfigError(ValueError):
    """Invalid configuration; the message starts with the dotted field path."""


@dataclass(frozen=True)
class Box:
    """Cell-index box ``x0 <= ix < x1``, ``y0 <= iy < y1``; None spans the axis."""

    x_range: tuple[int, int] | None = None
    y_range: tuple[int, int] | None = None

    def mask(self, mesh: Mesh) -> RegionMask:
        return RegionMask.box(mesh, self.x_range, self.y_range).require_nonempty()


@dataclass(frozen=True)
class VcmaConfig:
    beta: float = 9.0429e-5
    t_ox: float = 1e-9
    shape: typing.Literal["linear", "step"] = "linear"
    gate: Box | None = None

    def __post_init__(self):
        VcmaProfile(self.beta, self.t_ox, None, self.shape)

    def profile(self, mesh: Mesh) -> VcmaProfile:
        gate = None if self.gate is None else self.gate.mask(mesh)
        return VcmaProfile(self.beta, self.t_ox, gate, self.shape)


@dataclass(frozen=True)
class Axis:
    name: str
    min: float
    max: float
    count: int
    scale: typing.Literal["linear", "log"] = "linear"

    def __post_init__(self):
        if self.name not in SWEEP_PARAMETERS:
            raise ValueError(f"name must be one of {SWEEP_PARAMETERS}")
        if self.count < 2:
            raise ValueError("count must be >= 2")
        if self.scale not in ("linear", "log"):
            raise ValueError("scale must be 'linear' or 'log'")
        if self.scale == "log" and not (self.min > 0 and self.max > 0):
            raise ValueError("log axis needs positive bounds")

    def values(self) -> list[float]:
        if self.scale == "log":
            return [float(v) for v in np.geomspace(self.min, self.max, self.count)]
        return [float(v) for v in np.linspace(self.min, self.max, self.count)]


@dataclass(frozen=True)
class SweepSpec:
    axes: tuple[Axis, ...]
    protocol: typing.Literal["relax", "write+", "write-", "write_both"] = "relax"
    workers: int = 1

    def __post_init__(self):
        if self.protocol not in SWEEP_PROTOCOLS:
            raise ValueError(f"protocol must be one of {SWEEP_PROTOCOLS}")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if len({a.name for a in self.axes}) != len(self.axes):
            raise ValueError("axis names must be distinct")

    def grid(self) -> list[dict[str, float]]:
        """Cartesian product of the axes, first axis slowest."""
        names = [a.name for a in self.axes]
        return [dict(zip(names, vals)) for vals in itertools.product(*(a.values() for a in self.axes))]


def _default_phase_diagram() -> SweepSpec:
    return SweepSpec((Axis("Ku0", 7.7e5, 1.25e6, 5), Axis("D", 0.0, 4e-3, 5)), "relax")


def _default_dmi_window() -> SweepSpec:
    return SweepSpec((Axis("D", 0.0, 3e-3, 7),), "write_both")


def _default_gradient_curve() -> SweepSpec:
    return SweepSpec((Axis("Vb", 0.05, 0.25, 5),), "write+")


@dataclass(frozen=True)
class SweepsConfig:
    phase_diagram: SweepSpec = field(default_factory=_default_phase_diagram)
    dmi_window: SweepSpec = field(default_factory=_default_dmi_window)
    gradient_curve: SweepSpec = field(default_factory=_default_gradient_curve)


@dataclass(frozen=True)
class RunConfig:
    mesh: Mesh = field(default_factory=Mesh)
    material: MaterialParams = field(default_factory=MaterialParams)
    vcma: VcmaConfig = field(default_factory=VcmaConfig)
    write: WriteTiming = field(default_factory=WriteTiming)
    integrator: Controller = field(default_factory=Controller)
    relax: RelaxCriteria = field(default_factory=RelaxCriteria)
    thresholds: Thresholds = field(default_factory=Thresholds)
    pillar: Box | None = None
    sweeps: SweepsConfig = field(default_factory=SweepsConfig)
    out_dir: str = "out"
    seed: int = 0

    def vcma_profile(self) -> VcmaProfile:
        return self.vcma.profile(self.mesh)

    def pillar_mask(self) -> RegionMask | None:
        return None if self.pillar is None else self.pillar.mask(self.mesh)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def _convert(tp, value, path: str):
    origin = typing.get_origin(tp)
    args = typing.get_args(tp)
    if origin in (typing.Union, types.UnionType):
        if value is None:
            if type(None) in args:
                return None
            raise ConfigError(f"{path}: value may not be null")
        inner = [a for a in args if a is not type(None)]
        return _convert(inner[0], value, path)
    if dataclasses.is_dataclass(tp):
        return _build(tp, value, path)
    if origin is tuple:
        if not isinstance(value, (list, tuple)):
            raise ConfigError(f"{path}: expected a list")
        if len(args) == 2 and args[1] is Ellipsis:
            return tuple(_convert(args[0], v, f"{path}[{i}]") for i, v in enumerate(value))
        if len(value) != len(args):
            raise ConfigError(f"{path}: expected {len(args)} entries, got {len(value)}")
        return tuple(_convert(a, v, f"{path}[{i}]") for i, (a, v) in enumerate(zip(args, value)))
    if origin is typing.Literal:
        if value not in args:
            raise ConfigError(f"{path}: must be one of {list(args)}")
        return value
    if tp is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{path}: expected a number")
        return float(value)
    if tp is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{path}: expected an integer")
        return value
    if tp is str:
        if not isinstance(value, str):
            raise ConfigError(f"{path}: expected a string")
        return value
    return value


def _build(cls, data, path: str):
    if not isinstance(data, dict):
        raise ConfigError(f"{path or '<root>'}: expected a mapping")
    hints = typing.get_type_hints(cls)
    names = {f.name for f in dataclasses.fields(cls) if f.init}
    unknown = sorted(set(data) - names)
    if unknown:
        raise ConfigError(f"{_join(path, unknown[0])}: unknown key")
    kwargs = {k: _convert(hints[k], v, _join(path, k)) for k, v in data.items()}
    try:
        return cls(**kwargs)
    except ConfigError:
        raise
    except (ValueError, TypeError) as e:
        msg = str(e)
        head, _, rest = msg.partition(" ")
        if head in names:
            raise ConfigError(f"{_join(path, head)}: {rest}") from None
        raise ConfigError(f"{path or cls.__name__}: {msg}") from None


def _join(path: str, key: str) -> str:
    return f"{path}.{key}" if path else key


def from_dict(data: dict) -> RunConfig:
    return _build(RunConfig, data, "")


def load_config(path: str | Path | None, echo_dir: str | Path | None = None) -> RunConfig:
    """Read a JSON config (``None`` or ``"defaults"`` gives the default set).

    With ``echo_dir`` the fully resolved config is written there as
    ``resolved_config.json``.
    """
    if path is None or str(path) == "defaults":
        data = {}
    else:
        text = Path(path).read_text()
        try:
            data = json.loads(text) if text.strip() else {}
        except json.JSONDecodeError as e:
            raise ConfigError(f"<root>: JSON parse error at line {e.lineno}: {e.msg}") from None
    cfg = from_dict(data)
    if echo_dir is not None:
        Path(echo_dir).mkdir(parents=True, exist_ok=True)
        save_config(cfg, Path(echo_dir) / "resolved_config.json")
    return cfg


def save_config(cfg: RunConfig, path: str | Path) -> None:
    Path(path).write_text(json.dumps(cfg.to_dict(), indent=2, sort_keys=True) + "\n")

"""YAML experiment configs loaded into dataclasses; unknown keys are errors."""
from __future__ import annotations

import dataclasses
import math
import typing
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .errors import ConfigError
from . import limits as L
from . import observable as O
from .harness import HbarSchedule
from .phasespace import HusimiGridSpec
from .profile import gaussian_profile, load_profile_csv
from .state import PacketSpec, SemiclassicalParams


@dataclass
class ProfileConfig:
    kind: str = "gaussian"
    path: str | None = None


@dataclass
class PacketConfig:
    q0: list = field(default_factory=lambda: [0.0])
    p0: list = field(default_factory=lambda: [0.0])


@dataclass
class ParamsConfig:
    hbar: float = 0.05
    alpha: float | None = None
    gamma: float = 0.5


@dataclass
class ScheduleConfig:
    n_max: int = 5
    gamma: float = 0.5
    base: float = 0.4
    ratio: float = 0.5
    hbar_seq: list | None = None


@dataclass
class TimeConfig:
    """kind: absolute (t), rational (M, N, B), irrational (A, B) or growing."""
    kind: str = "absolute"
    t: float = 0.0
    M: int = 1
    N: int = 1
    A: str | float | None = None
    B: float = 0.0


@dataclass
class ObservableConfig:
    kind: str = "cosine"
    j: list = field(default_factory=lambda: [1])
    center: float | list = 0.0
    width: float = math.inf
    amplitude: float = 1.0


@dataclass
class GridConfig:
    n_q: int = 256
    n_p: int = 256
    p_lo: list | None = None
    p_hi: list | None = None


@dataclass
class ScanConfig:
    steps: int = 257
    peak_fraction: float = 0.2


@dataclass
class LimitConfig:
    residual_time: float | None = None
    theta_check: bool = False
    theta_B: list = field(default_factory=lambda: [0.25, 0.5, 1.0, 2.0])
    theta_points: int = 64
    resonance_bound: int = 100


@dataclass
class ExperimentConfig:
    dimension: int = 1
    profile: ProfileConfig = field(default_factory=ProfileConfig)
    packet: PacketConfig = field(default_factory=PacketConfig)
    params: ParamsConfig = field(default_factory=ParamsConfig)
    schedule: ScheduleConfig = field(default_factory=ScheduleConfig)
    time: TimeConfig = field(default_factory=TimeConfig)
    observables: list = field(default_factory=lambda: [ObservableConfig()])
    grid: GridConfig = field(default_factory=GridConfig)
    scan: ScanConfig = field(default_factory=ScanConfig)
    limit: LimitConfig = field(default_factory=LimitConfig)
    density_points: int = 256

    # -- builders ------------------------------------------------------------------

    def build_profile(self):
        if self.profile.kind == "gaussian":
            return gaussian_profile(self.dimension)
        if self.profile.kind == "sampled":
            if not self.profile.path:
                raise ConfigError("profile.path is required for a sampled profile")
            prof = load_profile_csv(self.profile.path)
            if prof.dimension != self.dimension:
                raise ConfigError("profile file dimension differs from config dimension")
            return prof
        raise ConfigError(f"unknown profile kind {self.profile.kind!r}")

    def build_spec(self):
        spec = PacketSpec(self.packet.q0, self.packet.p0)
        if spec.dimension != self.dimension:
            raise ConfigError("packet dimension differs from config dimension")
        return spec

    def build_params(self):
        p = self.params
        alpha = p.alpha if p.alpha is not None else p.hbar ** p.gamma
        return SemiclassicalParams(p.hbar, alpha, self.dimension)

    def build_schedule(self):
        s = self.schedule
        return HbarSchedule(s.n_max, s.gamma, s.base, s.ratio,
                            tuple(s.hbar_seq) if s.hbar_seq is not None else None)

    def build_time_schedule(self):
        t = self.time
        if t.kind == "rational":
            return L.RationalRevival(t.M, t.N, t.B)
        if t.kind == "irrational":
            if t.A is None:
                raise ConfigError("time.A is required for an irrational schedule")
            literal = t.A if isinstance(t.A, str) else None
            return L.IrrationalScale(float(t.A), t.B, literal)
        if t.kind == "growing":
            return L.GrowingAction()
        raise ConfigError(f"time kind {t.kind!r} is not a schedule")

    def build_observable(self):
        if not self.observables:
            raise ConfigError("at least one observable is required")
        total = None
        for oc in self.observables:
            j = [int(v) for v in oc.j]
            if len(j) != self.dimension:
                raise ConfigError("observable j has the wrong dimension")
            makers = {"cosine": O.cosine, "sine": O.sine}
            if oc.kind == "constant":
                term = O.constant(self.dimension, oc.amplitude, oc.center, oc.width)
            elif oc.kind in makers:
                term = makers[oc.kind](j, oc.center, oc.width, oc.amplitude)
            else:
                raise ConfigError(f"unknown observable kind {oc.kind!r}")
            total = term if total is None else total + term
        return total

    def build_grid(self):
        g = self.grid
        return HusimiGridSpec(g.n_q, g.n_p,
                              tuple(g.p_lo) if g.p_lo is not None else None,
                              tuple(g.p_hi) if g.p_hi is not None else None)


def _coerce(tp, value, where):
    origin = typing.get_origin(tp)
    args = typing.get_args(tp)
    if dataclasses.is_dataclass(tp):
        return _build(tp, value, where)
    if origin is typing.Union or type(tp).__name__ == "UnionType":
        if value is None and type(None) in args:
            return None
        for arg in args:
            if arg is type(None):
                continue
            try:
                return _coerce(arg, value, where)
            except ConfigError:
                continue
        raise ConfigError(f"{where}: cannot interpret {value!r}")
    if tp is float:
        if isinstance(value, bool):
            raise ConfigError(f"{where}: expected a number")
        try:
            return float(value)
        except (TypeError, ValueError):
            raise ConfigError(f"{where}: expected a number, got {value!r}") from None
    if tp is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{where}: expected an integer, got {value!r}")
        return value
    if tp is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"{where}: expected true/false")
        return value
    if tp is str:
        if not isinstance(value, str):
            raise ConfigError(f"{where}: expected a string")
        return value
    if tp is list:
        if not isinstance(value, list):
            raise ConfigError(f"{where}: expected a list")
        return value
    return value


def _build(cls, data, where="config"):
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(f"{where}: expected a mapping")
    hints = typing.get_type_hints(cls)
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(data) - names)
    if unknown:
        raise ConfigError(f"{where}: unknown keys {unknown}")
    kwargs = {}
    for name, value in data.items():
        if cls is ExperimentConfig and name == "observables":
            if not isinstance(value, list):
                raise ConfigError("observables: expected a list")
            kwargs[name] = [_build(ObservableConfig, v, f"observables[{i}]") for i, v in enumerate(value)]
        else:
            kwargs[name] = _coerce(hints[name], value, f"{where}.{name}")
    return cls(**kwargs)


def config_from_dict(data):
    return _build(ExperimentConfig, data)


def load_config(path):
    """(config, raw text); parse and schema problems raise ConfigError."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML: {exc}") from exc
    return config_from_dict(data), text

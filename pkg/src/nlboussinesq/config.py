"""Run configuration: strict JSON schema backed by frozen dataclasses."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

from .errors import ConfigError

MODES = ("run", "verify", "uniqueness", "converge", "check")
SCENARIOS = ("equilibrium", "thermal-decay", "buoyant-cell", "uniqueness-pair")
SPLITTINGS = ("heat-first", "momentum-first")
A_HANDLING = ("shift", "direct")
POTENTIAL_IDS = ("x", "y", "saddle")

# JSON keys that differ from the dataclass attribute names
_KEY = {"lam": "lambda"}
_ATTR = {v: k for k, v in _KEY.items()}


@dataclass(frozen=True)
class MeshConfig:
    nx: int = 32


@dataclass(frozen=True)
class PhysicsConfig:
    mu: float = 0.1
    kappa: float = 0.1
    a: float = 0.0
    lam: float = 1.0


@dataclass(frozen=True)
class BasisConfig:
    N: int = 16


@dataclass(frozen=True)
class TimeConfig:
    dt: float = 2e-3
    T_end: float = 1.0
    output_every: int = 50


@dataclass(frozen=True)
class ScenarioConfig:
    id: str = "buoyant-cell"
    T_B: float = 1.0
    amplitude: float = 1.0


@dataclass(frozen=True)
class DataConfig:
    """Optional snapshot files overriding parts of the scenario bundle."""

    theta0: str | None = None
    theta_B: str | None = None
    v0: str | None = None
    potential: str | None = None


@dataclass(frozen=True)
class RunConfig:
    mesh: MeshConfig = field(default_factory=MeshConfig)
    physics: PhysicsConfig = field(default_factory=PhysicsConfig)
    basis: BasisConfig = field(default_factory=BasisConfig)
    time: TimeConfig = field(default_factory=TimeConfig)
    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)
    data: DataConfig = field(default_factory=DataConfig)
    output_dir: str = "run"
    mode: str = "run"
    splitting: str = "heat-first"
    a_handling: str = "shift"

    @property
    def n_steps(self) -> int:
        return int(round(self.time.T_end / self.time.dt))

    def with_(self, **sections) -> RunConfig:
        """Copy with section fields replaced, e.g. ``cfg.with_(time={"dt": 1e-3})``.

        Section keys may use either the JSON spelling (``"lambda"``) or the
        attribute name (``"lam"``).
        """
        updates = {}
        for name, value in sections.items():
            current = getattr(self, name)
            if isinstance(value, dict):
                updates[name] = replace(current, **{_ATTR.get(k, k): v for k, v in value.items()})
            else:
                updates[name] = value
        return validate(replace(self, **updates))


_SECTIONS = {
    "mesh": MeshConfig,
    "physics": PhysicsConfig,
    "basis": BasisConfig,
    "time": TimeConfig,
    "scenario": ScenarioConfig,
    "data": DataConfig,
}


def _coerce(path: str, value, typ: str):
    if typ == "int":
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(path, f"expected an integer, got {value!r}")
        return value
    if typ == "float":
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
            raise ConfigError(path, f"expected a finite number, got {value!r}")
        return float(value)
    if typ == "str":
        if not isinstance(value, str):
            raise ConfigError(path, f"expected a string, got {value!r}")
        return value
    if typ == "str | None":
        if value is not None and not isinstance(value, str):
            raise ConfigError(path, f"expected a string or null, got {value!r}")
        return value
    raise AssertionError(typ)


def _section(name: str, cls, raw) -> object:
    if not isinstance(raw, dict):
        raise ConfigError(name, "expected an object")
    known = {f.name: f for f in fields(cls)}
    kwargs = {}
    for key, value in raw.items():
        attr = _ATTR.get(key, key)
        if attr not in known or attr in _KEY and key != _KEY[attr]:
            raise ConfigError(f"{name}.{key}", "unknown key")
        kwargs[attr] = _coerce(f"{name}.{key}", value, known[attr].type)
    return cls(**kwargs)


def from_dict(raw: dict) -> RunConfig:
    if not isinstance(raw, dict):
        raise ConfigError("<root>", "configuration must be a JSON object")
    kwargs = {}
    top = {f.name: f for f in fields(RunConfig)}
    for key, value in raw.items():
        if key not in top:
            raise ConfigError(key, "unknown key")
        if key in _SECTIONS:
            kwargs[key] = _section(key, _SECTIONS[key], value)
        else:
            kwargs[key] = _coerce(key, value, "str")
    return validate(RunConfig(**kwargs))


def validate(cfg: RunConfig) -> RunConfig:
    if cfg.mesh.nx < 8:
        raise ConfigError("mesh.nx", "must be at least 8")
    if cfg.mesh.nx > 64:
        raise ConfigError("mesh.nx", "dense Stokes eigensolve is limited to nx <= 64")
    p = cfg.physics
    if not p.lam > 0:
        raise ConfigError("physics.lambda", f"must be > 0 (non-local condition requires lambda > 0), got {p.lam}")
    if not p.mu > 0:
        raise ConfigError("physics.mu", "viscosity must be > 0")
    if not p.kappa > 0:
        raise ConfigError("physics.kappa", "conductivity must be > 0")
    if cfg.basis.N < 1 or cfg.basis.N > (cfg.mesh.nx - 1) ** 2:
        raise ConfigError("basis.N", f"must be in [1, {(cfg.mesh.nx - 1) ** 2}]")
    t = cfg.time
    if not t.dt > 0:
        raise ConfigError("time.dt", "must be > 0")
    if t.T_end < t.dt:
        raise ConfigError("time.T_end", "must be >= dt")
    if t.output_every < 1:
        raise ConfigError("time.output_every", "must be >= 1")
    if cfg.scenario.id not in SCENARIOS:
        raise ConfigError("scenario.id", f"unknown scenario {cfg.scenario.id!r}; known: {', '.join(SCENARIOS)}")
    if cfg.data.potential is not None and cfg.data.potential not in POTENTIAL_IDS:
        raise ConfigError("data.potential", f"must be one of {POTENTIAL_IDS}")
    if cfg.mode not in MODES:
        raise ConfigError("mode", f"must be one of {MODES}")
    if cfg.splitting not in SPLITTINGS:
        raise ConfigError("splitting", f"must be one of {SPLITTINGS}")
    if cfg.a_handling not in A_HANDLING:
        raise ConfigError("a_handling", f"must be one of {A_HANDLING}")
    return cfg


def parse_config(path: Path | str) -> RunConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except FileNotFoundError:
        raise ConfigError("<file>", f"{path} does not exist") from None
    except json.JSONDecodeError as exc:
        raise ConfigError("<file>", f"invalid JSON: {exc}") from None
    return from_dict(raw)


def to_dict(cfg: RunConfig) -> dict:
    out = {}
    for name, value in asdict(cfg).items():
        if isinstance(value, dict):
            out[name] = {_KEY.get(k, k): v for k, v in value.items()}
        else:
            out[name] = value
    return out


def echo(cfg: RunConfig) -> str:
    """Canonical JSON (sorted keys), stable byte for byte."""
    return json.dumps(to_dict(cfg), indent=2, sort_keys=True) + "\n"


def default_config_text() -> str:
    return echo(RunConfig())

"""Run configuration: YAML schema, validation and round-trip serialization.

Schema (all keys except `model` optional; defaults come from the model
registry entry):

    model: brusselator_manufactured   # registry name
    params: {a: 1.0, b: 0.5, d1: 1.0, d2: 1.0}
    domain: [0.0, 1.0, 0.0, 1.0]      # x0, x1, y0, y1
    n: 10                             # cells per axis, or a list for sweeps
    degree: 3                         # spline degree r, 3..6
    tau: h^2                          # number, "h^p" or "c*h^p"
    t_end: 1.0
    initial: ramp                     # named initial data (non-manufactured)
    snapshot_times: [0.0, 1.0]
    workers: 1
    resolution: 101                   # plotting lattice points per axis

The time-step rule is resolved against the x mesh width h = (x1-x0)/n;
the step count rounds t_end/tau to an integer, warning when the
adjustment exceeds 1%.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from typing import Optional, Union

import yaml

from .models import MODEL_REGISTRY, _INITIAL_BUILDERS

__all__ = ["ConfigError", "TauRule", "RunConfig", "parse_config",
           "serialize_config"]

_TAU_RE = re.compile(r"^\s*(?:([0-9eE.+-]+)\s*\*\s*)?h\s*\^\s*([0-9eE.+-]+)\s*$")


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending key."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


@dataclass(frozen=True)
class TauRule:
    """Explicit time step, or the mesh coupling coef * h^power."""

    value: Optional[float] = None
    coef: float = 1.0
    power: Optional[float] = None

    def __post_init__(self):
        if (self.value is None) == (self.power is None):
            raise ValueError("tau rule needs exactly one of value / power")

    def resolve(self, h: float) -> float:
        if self.value is not None:
            return self.value
        return self.coef * h ** self.power

    def spec(self) -> Union[float, str]:
        if self.value is not None:
            return self.value
        if self.coef == 1.0:
            return f"h^{self.power:g}"
        return f"{self.coef:g}*h^{self.power:g}"

    @classmethod
    def parse(cls, raw, key: str = "tau") -> "TauRule":
        if isinstance(raw, (int, float)) and not isinstance(raw, bool):
            if raw <= 0:
                raise ConfigError(key, "explicit time step must be positive")
            return cls(value=float(raw))
        if isinstance(raw, str):
            m = _TAU_RE.match(raw)
            if m:
                coef = float(m.group(1)) if m.group(1) else 1.0
                power = float(m.group(2))
                if coef <= 0:
                    raise ConfigError(key, "coefficient must be positive")
                return cls(coef=coef, power=power)
            try:
                val = float(raw)
            except ValueError:
                raise ConfigError(
                    key, f"cannot parse {raw!r}; use a number, 'h^p' or 'c*h^p'"
                ) from None
            if val <= 0:
                raise ConfigError(key, "explicit time step must be positive")
            return cls(value=val)
        raise ConfigError(key, f"cannot parse {raw!r}")


@dataclass(frozen=True)
class RunConfig:
    model: str
    params: dict
    domain: tuple[float, float, float, float]
    n: Union[int, tuple[int, ...]]
    degree: int
    tau: TauRule
    t_end: float
    initial: Optional[str] = None
    snapshot_times: tuple[float, ...] = ()
    workers: int = 1
    resolution: int = 101

    @property
    def n_values(self) -> tuple[int, ...]:
        return (self.n,) if isinstance(self.n, int) else self.n

    def with_n(self, n: int) -> "RunConfig":
        return replace(self, n=n)


_KNOWN_KEYS = {"model", "params", "domain", "n", "degree", "tau", "t_end",
               "initial", "snapshot_times", "workers", "resolution"}


def parse_config(text: str) -> RunConfig:
    """Parse and validate a YAML configuration document."""
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError("<document>", f"not valid YAML: {exc}") from exc
    if raw is None:
        raise ConfigError("<document>", "empty configuration")
    if not isinstance(raw, dict):
        raise ConfigError("<document>", "top level must be a mapping")
    unknown = set(raw) - _KNOWN_KEYS
    if unknown:
        raise ConfigError(sorted(unknown)[0], "unknown key")

    name = raw.get("model")
    if not isinstance(name, str) or name not in MODEL_REGISTRY:
        known = ", ".join(sorted(MODEL_REGISTRY))
        raise ConfigError("model", f"unknown model {name!r}; known: {known}")
    entry = MODEL_REGISTRY[name]

    params = dict(entry.defaults)
    for key, val in (raw.get("params") or {}).items():
        if key not in params:
            raise ConfigError(f"params.{key}", f"unknown parameter for {name}")
        if not isinstance(val, (int, float)) or isinstance(val, bool):
            raise ConfigError(f"params.{key}", "must be a number")
        params[key] = float(val)

    dom = raw.get("domain")
    if dom is None:
        d = entry.domain
        domain = (d.x0, d.x1, d.y0, d.y1)
    else:
        if (not isinstance(dom, (list, tuple)) or len(dom) != 4
                or not all(isinstance(v, (int, float)) for v in dom)):
            raise ConfigError("domain", "expected [x0, x1, y0, y1]")
        domain = tuple(float(v) for v in dom)
        if not (domain[1] > domain[0] and domain[3] > domain[2]):
            raise ConfigError("domain", "rectangle is degenerate")

    n_raw = raw.get("n", 10)
    if isinstance(n_raw, int) and not isinstance(n_raw, bool):
        n: Union[int, tuple[int, ...]] = n_raw
        n_list = [n_raw]
    elif isinstance(n_raw, (list, tuple)) and n_raw:
        if not all(isinstance(v, int) and not isinstance(v, bool) for v in n_raw):
            raise ConfigError("n", "list entries must be integers")
        n = tuple(n_raw)
        n_list = list(n_raw)
    else:
        raise ConfigError("n", "expected an integer or a list of integers")
    for v in n_list:
        if v < 1:
            raise ConfigError("n", f"cell count must be >= 1, got {v}")

    degree = raw.get("degree", 3)
    if not isinstance(degree, int) or isinstance(degree, bool) \
            or not 3 <= degree <= 6:
        raise ConfigError("degree", f"must be an integer in 3..6, got {degree!r}")

    tau = TauRule.parse(raw.get("tau", "h^2"))

    t_end = raw.get("t_end", entry.t_end)
    if not isinstance(t_end, (int, float)) or isinstance(t_end, bool) or t_end <= 0:
        raise ConfigError("t_end", "must be a positive number")

    initial = raw.get("initial")
    if initial is not None:
        if entry.initial is None:
            raise ConfigError(
                "initial", f"{name} takes its initial data from its exact solution")
        if initial not in _INITIAL_BUILDERS:
            known = ", ".join(sorted(_INITIAL_BUILDERS))
            raise ConfigError("initial", f"unknown kind {initial!r}; known: {known}")

    snaps_raw = raw.get("snapshot_times", [])
    if not isinstance(snaps_raw, (list, tuple)) \
            or not all(isinstance(v, (int, float)) for v in snaps_raw):
        raise ConfigError("snapshot_times", "expected a list of times")
    snapshot_times = tuple(float(v) for v in snaps_raw)
    for t in snapshot_times:
        if t < 0 or t > float(t_end):
            raise ConfigError("snapshot_times", f"time {t:g} outside [0, t_end]")

    workers = raw.get("workers", 1)
    if not isinstance(workers, int) or isinstance(workers, bool) or workers < 1:
        raise ConfigError("workers", "must be a positive integer")

    resolution = raw.get("resolution", 101)
    if not isinstance(resolution, int) or isinstance(resolution, bool) \
            or resolution < 2:
        raise ConfigError("resolution", "must be an integer >= 2")

    return RunConfig(model=name, params=params, domain=domain, n=n,
                     degree=degree, tau=tau, t_end=float(t_end),
                     initial=initial, snapshot_times=snapshot_times,
                     workers=workers, resolution=resolution)


def serialize_config(cfg: RunConfig) -> str:
    """Emit YAML that parse_config maps back to an equal RunConfig."""
    doc = {
        "model": cfg.model,
        "params": dict(cfg.params),
        "domain": list(cfg.domain),
        "n": cfg.n if isinstance(cfg.n, int) else list(cfg.n),
        "degree": cfg.degree,
        "tau": cfg.tau.spec(),
        "t_end": cfg.t_end,
        "snapshot_times": list(cfg.snapshot_times),
        "workers": cfg.workers,
        "resolution": cfg.resolution,
    }
    if cfg.initial is not None:
        doc["initial"] = cfg.initial
    return yaml.safe_dump(doc, sort_keys=False)

"""``key=value`` run configuration: a file of such lines plus CLI overrides."""
from __future__ import annotations

import os
from dataclasses import dataclass, field, fields

from .scenarios import SCENARIOS


class ConfigError(ValueError):
    def __init__(self, message: str, key: str | None = None):
        self.key = key
        super().__init__(f"{key}: {message}" if key else message)


def _bool(s: str) -> bool:
    low = s.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _floats(s: str) -> list[float]:
    return [float(p) for p in s.replace(";", ",").split(",") if p.strip()]


def _gauges(s: str) -> list[tuple[str, float, float]]:
    # label:x:y;label:x:y
    out = []
    for item in s.split(";"):
        item = item.strip()
        if not item:
            continue
        parts = item.split(":")
        if len(parts) != 3:
            raise ValueError(f"gauge must be label:x:y, got {item!r}")
        out.append((parts[0].strip(), float(parts[1]), float(parts[2])))
    return out


# scenario parameters each scenario accepts
SCENARIO_PARAMS = {
    "steady_slope": {"regime": str, "orientation": str},
    "dam_break": {"closed": _bool},
    "solitary_runup": {"kind": str, "toe": float},
    "periodic_wave": {"toe": float, "series": str},
    "conical_island": {"ratio": float},
    "complex_beach": {"alpha": float, "still_level": float, "closed": _bool},
}
_ALL_PARAMS = {k: v for d in SCENARIO_PARAMS.values() for k, v in d.items()}


@dataclass
class RunConfig:
    scenario: str
    params: dict = field(default_factory=dict)
    nx: int | None = None
    ny: int | None = None
    mesh: str | None = None
    diagonal: str = "alternating"
    cfl: float = 0.25
    t_end: float | None = None
    n_f: float | None = None
    dt_max: float | None = None
    gauges: list | None = None
    gauge_interval: float | None = None
    snapshot_times: list | None = None
    snapshot_format: str = "csv"
    output_dir: str | None = None
    backend: str | None = None
    max_steps: int | None = None
    max_wall_time: float | None = None


_CONVERTERS = {
    "nx": int, "ny": int, "mesh": str, "diagonal": str, "cfl": float, "t_end": float,
    "n_f": float, "dt_max": float, "gauges": _gauges, "gauge_interval": float,
    "snapshot_times": _floats, "snapshot_format": str, "output_dir": str, "backend": str,
    "max_steps": int, "max_wall_time": float,
}
KNOWN_KEYS = ("scenario",) + tuple(_CONVERTERS) + tuple(_ALL_PARAMS)


def _tokens_from_file(path) -> list[tuple[str, str, str]]:
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    out = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}: line {lineno}: expected key=value, got {line!r}")
            key, val = line.split("=", 1)
            out.append((key.strip(), val.strip(), f"{path}:{lineno}"))
    return out


def _tokens_from_args(args) -> list[tuple[str, str, str]]:
    out = []
    for tok in args:
        body = tok[2:] if tok.startswith("--") else tok
        if "=" not in body:
            raise ConfigError(f"expected key=value, got {tok!r}")
        key, val = body.split("=", 1)
        out.append((key.strip().replace("-", "_"), val.strip(), "command line"))
    return out


def parse_config(source=None, overrides=()) -> RunConfig:
    """Build a :class:`RunConfig` from a file path and/or ``key=value`` tokens.

    ``source`` may be a path or a sequence of tokens; ``overrides`` (tokens,
    optionally ``--``-prefixed) win over file values.
    """
    items = []
    if isinstance(source, (str, os.PathLike)):
        items += _tokens_from_file(source)
    elif source is not None:
        items += _tokens_from_args(source)
    items += _tokens_from_args(overrides)

    raw: dict[str, str] = {}
    for key, val, where in items:
        if key not in KNOWN_KEYS:
            raise ConfigError(f"unknown key ({where}); known keys: {', '.join(KNOWN_KEYS)}", key)
        raw[key] = val

    if "scenario" not in raw:
        raise ConfigError("missing required key(s): scenario "
                          f"(one of {', '.join(SCENARIOS)})")
    scen = raw.pop("scenario")
    if scen not in SCENARIOS:
        raise ConfigError(f"unknown scenario {scen!r}; available: {', '.join(SCENARIOS)}",
                          "scenario")

    kwargs: dict = {}
    params: dict = {}
    allowed = SCENARIO_PARAMS[scen]
    for key, val in raw.items():
        if key in _CONVERTERS:
            conv = _CONVERTERS[key]
            target = kwargs
        elif key in allowed:
            conv = allowed[key]
            target = params
        else:
            raise ConfigError(f"not a parameter of scenario {scen!r}; it accepts "
                              f"{', '.join(allowed) or 'none'}", key)
        try:
            target[key] = conv(val)
        except ValueError as exc:
            raise ConfigError(f"malformed value {val!r} ({exc})", key) from None

    cfg = RunConfig(scenario=scen, params=params, **kwargs)
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig) -> None:
    if not 0.0 < cfg.cfl <= 1.0:
        raise ConfigError(f"must be in (0, 1], got {cfg.cfl}", "cfl")
    for key in ("nx", "ny", "max_steps"):
        v = getattr(cfg, key)
        if v is not None and v < 1:
            raise ConfigError(f"must be a positive integer, got {v}", key)
    for key in ("t_end", "n_f", "gauge_interval", "dt_max", "max_wall_time"):
        v = getattr(cfg, key)
        if v is not None and not v >= 0:
            raise ConfigError(f"must be non-negative, got {v}", key)
    for key in ("gauge_interval", "dt_max"):
        v = getattr(cfg, key)
        if v is not None and v == 0:
            raise ConfigError("must be positive", key)
    if cfg.diagonal not in ("uniform", "alternating"):
        raise ConfigError("must be 'uniform' or 'alternating'", "diagonal")
    if cfg.snapshot_format not in ("csv", "vtk_ascii"):
        raise ConfigError("must be 'csv' or 'vtk_ascii'", "snapshot_format")
    if cfg.backend not in (None, "compiled", "numpy"):
        raise ConfigError("must be 'compiled' or 'numpy'", "backend")
    if cfg.mesh is not None and not os.path.exists(cfg.mesh):
        raise ConfigError(f"mesh file not found: {cfg.mesh}", "mesh")
    series = cfg.params.get("series")
    if series is not None and not os.path.exists(series):
        raise ConfigError(f"series file not found: {series}", "series")


def config_fields() -> list[str]:
    return [f.name for f in fields(RunConfig)]

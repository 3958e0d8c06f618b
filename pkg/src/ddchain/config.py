"""Run configuration: flat key=value files, flag overrides, validation.

Config files are UTF-8 text, one ``key=value`` per line; blank lines and
lines starting with ``#`` are ignored. Keys not in the schema are an
error (no silent typo tolerance), with one exception: keys under the
reserved ``result.`` prefix are skipped, so a run's metadata sidecar can
be fed back in as a config file and reproduces the run exactly.

Every field always has a concrete value after parsing (kind-dependent
defaults are resolved at parse time), so serializing a RunConfig and
parsing it back is the identity.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, fields

from .errors import DdchainError

KINDS = ("delta-tau", "size", "trace", "ratio-psi", "kernel", "pq-check")

RESULT_PREFIX = "result."


class ConfigError(DdchainError):
    """Malformed, unknown, missing, or out-of-range configuration input."""


@dataclass(frozen=True)
class RunConfig:
    """Fully validated parameters of one CLI run."""

    kind: str
    n: int
    j: float
    psi: float
    delta: float
    tau: float
    m: int
    gamma: float
    epsilon: float
    eta: float
    seed: int
    workers: int
    out: str
    record_every: int
    n_values: tuple[int, ...]
    delta_min: float
    delta_max: float
    delta_steps: int
    tau_min: float
    tau_max: float
    tau_steps: int
    ratio_min: float
    ratio_max: float
    ratio_steps: int
    psi_min: float
    psi_max: float
    psi_steps: int
    dt: float
    t_max: float
    threshold: float
    hold: float


def _parse_int(text: str) -> int:
    return int(text, 10)


def _parse_float(text: str) -> float:
    value = float(text)
    return value


def _parse_int_list(text: str) -> tuple[int, ...]:
    return tuple(int(part, 10) for part in text.split(",") if part.strip())


_PARSERS = {
    "kind": str,
    "n": _parse_int,
    "j": _parse_float,
    "psi": _parse_float,
    "delta": _parse_float,
    "tau": _parse_float,
    "m": _parse_int,
    "gamma": _parse_float,
    "epsilon": _parse_float,
    "eta": _parse_float,
    "seed": _parse_int,
    "workers": _parse_int,
    "out": str,
    "record_every": _parse_int,
    "n_values": _parse_int_list,
    "delta_min": _parse_float,
    "delta_max": _parse_float,
    "delta_steps": _parse_int,
    "tau_min": _parse_float,
    "tau_max": _parse_float,
    "tau_steps": _parse_int,
    "ratio_min": _parse_float,
    "ratio_max": _parse_float,
    "ratio_steps": _parse_int,
    "psi_min": _parse_float,
    "psi_max": _parse_float,
    "psi_steps": _parse_int,
    "dt": _parse_float,
    "t_max": _parse_float,
    "threshold": _parse_float,
    "hold": _parse_float,
}

# Defaults that do not depend on the experiment kind.
_DEFAULTS = {
    "n": 130,
    "j": 1.0,
    "psi": 8.0,
    "delta": 1.2,
    "tau": 1.3,
    "m": 128,
    "seed": 1,
    "record_every": 1,
    "n_values": tuple(range(20, 131)),
    "delta_min": 0.02,
    "delta_max": 2.0,
    "delta_steps": 100,
    "tau_min": 0.02,
    "tau_max": 2.5,
    "tau_steps": 100,
    "ratio_min": 1.0,
    "ratio_max": 2.0,
    "ratio_steps": 100,
    "psi_min": 0.0,
    "psi_max": 20.0,
    "psi_steps": 100,
    "t_max": 5.0,
    "threshold": 0.02,
    "hold": 0.5,
}

# Kinds that consume the single (delta, tau) pair and so must satisfy
# delta <= tau up front.
_SINGLE_PULSE_KINDS = ("size", "trace", "pq-check")


def read_key_value_file(path: str) -> dict[str, str]:
    """Raw key -> value strings from a flat config file."""
    entries: dict[str, str] = {}
    with open(path, encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, _, value = line.partition("=")
            entries[key.strip()] = value.strip()
    return entries


def parse_config(
    path: str | None = None,
    overrides: dict[str, str] | None = None,
    kind: str | None = None,
) -> RunConfig:
    """Build a validated RunConfig from a config file and/or overrides.

    ``overrides`` (e.g. command-line flags) take precedence over file
    values. ``kind`` (e.g. the CLI subcommand) must agree with any kind
    given in the file.
    """
    raw: dict[str, str] = {}
    if path is not None:
        raw.update(read_key_value_file(path))
    if overrides:
        raw.update({k: v for k, v in overrides.items() if v is not None})

    values: dict[str, object] = {}
    for key, text in raw.items():
        if key.startswith(RESULT_PREFIX):
            continue
        parser = _PARSERS.get(key)
        if parser is None:
            raise ConfigError(f"unknown key {key!r}")
        try:
            values[key] = parser(text)
        except ValueError as exc:
            raise ConfigError(f"bad value for key {key!r}: {text!r} ({exc})") from exc

    file_kind = values.pop("kind", None)
    if kind is None:
        kind = file_kind
    elif file_kind is not None and file_kind != kind:
        raise ConfigError(f"config kind {file_kind!r} does not match requested {kind!r}")
    if kind is None:
        raise ConfigError("missing required key 'kind'")
    if kind not in KINDS:
        raise ConfigError(f"unknown kind {kind!r}; expected one of {', '.join(KINDS)}")

    merged = dict(_DEFAULTS)
    merged.update(values)
    merged["kind"] = kind
    # Kind-dependent defaults.
    merged.setdefault("out", f"{kind}.csv")
    merged.setdefault("workers", os.cpu_count() or 1)
    merged.setdefault("dt", 0.001 if kind == "pq-check" else 0.01)
    if kind == "trace":
        merged.setdefault("gamma", 0.5)
        merged.setdefault("epsilon", 0.5)
        merged.setdefault("eta", 0.1)
    else:
        merged.setdefault("gamma", 0.0)
        merged.setdefault("epsilon", 0.0)
        merged.setdefault("eta", 0.0)

    config = RunConfig(**merged)
    _validate(config)
    return config


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ConfigError(message)


def _validate(cfg: RunConfig) -> None:
    _require(cfg.n >= 2, f"n must be >= 2, got {cfg.n}")
    for key in ("j", "psi", "delta", "tau", "gamma", "epsilon", "eta",
                "dt", "t_max", "threshold", "hold",
                "delta_min", "delta_max", "tau_min", "tau_max",
                "ratio_min", "ratio_max", "psi_min", "psi_max"):
        _require(math.isfinite(getattr(cfg, key)), f"{key} must be finite")
    _require(cfg.tau > 0, f"tau must be > 0, got {cfg.tau}")
    _require(cfg.delta >= 0, f"delta must be >= 0, got {cfg.delta}")
    _require(cfg.m >= 1, f"m must be >= 1, got {cfg.m}")
    for key in ("gamma", "epsilon", "eta"):
        _require(getattr(cfg, key) >= 0, f"{key} must be >= 0")
    _require(0 <= cfg.seed < 2 ** 64, f"seed must fit in 64 bits, got {cfg.seed}")
    _require(cfg.workers >= 1, f"workers must be >= 1, got {cfg.workers}")
    _require(cfg.record_every >= 1, f"record_every must be >= 1, got {cfg.record_every}")
    _require(cfg.dt > 0, f"dt must be > 0, got {cfg.dt}")
    _require(cfg.t_max > 0, f"t_max must be > 0, got {cfg.t_max}")
    _require(0 < cfg.threshold < 1, f"threshold must be in (0, 1), got {cfg.threshold}")
    _require(cfg.hold >= cfg.dt, f"hold must be >= dt, got {cfg.hold}")

    if cfg.kind in _SINGLE_PULSE_KINDS:
        _require(
            cfg.delta <= cfg.tau,
            f"delta must be <= tau for kind={cfg.kind}, got delta={cfg.delta}, tau={cfg.tau}",
        )
    if cfg.kind == "size":
        _require(len(cfg.n_values) > 0, "n_values must be nonempty")
        _require(all(v >= 2 for v in cfg.n_values), "every n_values entry must be >= 2")
        _require(
            all(b > a for a, b in zip(cfg.n_values, cfg.n_values[1:])),
            "n_values must be strictly increasing",
        )
    if cfg.kind == "ratio-psi":
        _require(cfg.ratio_min >= 1.0, f"ratio_min must be >= 1, got {cfg.ratio_min}")
    if cfg.kind == "pq-check":
        _require(cfg.eta == 0.0, "pq-check needs a static environment; eta must be 0")
    for axis in ("delta", "tau", "ratio", "psi"):
        lo = getattr(cfg, f"{axis}_min")
        hi = getattr(cfg, f"{axis}_max")
        steps = getattr(cfg, f"{axis}_steps")
        _require(steps >= 1, f"{axis}_steps must be >= 1, got {steps}")
        _require(
            lo <= hi if steps == 1 else lo < hi,
            f"need {axis}_min < {axis}_max, got [{lo}, {hi}]",
        )


def _format_value(value) -> str:
    if isinstance(value, tuple):
        return ",".join(str(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def config_to_lines(cfg: RunConfig) -> list[str]:
    """Canonical key=value serialization, one field per line.

    Floats use ``repr`` so parsing the lines back reproduces the config
    bit for bit.
    """
    return [f"{f.name}={_format_value(getattr(cfg, f.name))}" for f in fields(cfg)]

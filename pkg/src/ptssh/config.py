"""Experiment configuration: flat ``key = value`` files and their round trip."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, fields
from typing import Any

from .model import LatticeError, normalize_kind

COMMANDS = (
    "spectrum-sweep",
    "ep-find",
    "ep-sweep",
    "bulk-phase",
    "ansatz-profile",
    "wavefunction-compare",
)

# execution options: never part of the experiment identity written to CSV headers
RUNTIME_KEYS = ("out", "threads", "plot")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    """Every knob of one CLI run.

    Gains and energies are in the same absolute units as ``w``; outputs are
    divided by ``w``.  ``gamma`` is the swept amplitude, meaning the uniform
    gain for ``profile = uniform`` and ``U`` otherwise.  With
    ``gamma_relative = true`` all gamma values are multiples of the
    analytic critical amplitude instead.
    """

    command: str = "spectrum-sweep"
    M: int = 12
    w: float = 1.0
    u: float | None = 1.5
    v: float | None = None
    profile: str = "uniform"
    profile_file: str | None = None
    seed: int | None = None
    gamma: float = 0.0
    gamma_min: float = 0.0
    gamma_max: float = 2.6
    gamma_points: int = 261
    gamma_relative: bool = False
    refine_points: int = 0
    M_list: tuple[int, ...] = ()
    u_list: tuple[float, ...] = ()
    tol: float = 1e-6
    Nk: int = 4096
    out: str | None = None
    threads: int = 1
    plot: str | None = None

    @property
    def ratio(self) -> float:
        """Hopping ratio ``u = w / v``."""
        return self.u if self.u is not None else self.w / self.v

    def validate(self) -> "ExperimentConfig":
        if self.command not in COMMANDS:
            raise ConfigError(f"command: unknown {self.command!r}; expected one of {', '.join(COMMANDS)}")
        if not (self.w > 0 and math.isfinite(self.w)):
            raise ConfigError(f"w: must be positive, got {self.w}")
        if self.u is not None and self.v is not None:
            raise ConfigError("u, v: give the hopping ratio u or the intra-cell hopping v, not both")
        needs_chain = self.command not in ("ep-sweep", "bulk-phase")
        if needs_chain:
            if self.u is None and self.v is None:
                raise ConfigError("u: required (or give v)")
            if not self.ratio > 0:
                raise ConfigError(f"u: must be positive, got {self.ratio}")
            if self.M % 2 or self.M < 4:
                raise ConfigError(f"M: must be even and >= 4, got {self.M}")
        try:
            kind = normalize_kind(self.profile)
        except LatticeError as exc:
            raise ConfigError(f"profile: {exc}") from None
        if kind == "custom" and not self.profile_file:
            raise ConfigError("profile_file: required for profile = custom")
        if kind != "custom" and self.profile_file:
            raise ConfigError("profile_file: only used with profile = custom")
        if kind == "random" and self.seed is None and self.command != "bulk-phase":
            raise ConfigError("seed: required for profile = random")
        if self.command == "ep-sweep":
            if not self.M_list:
                raise ConfigError("M_list: required for ep-sweep")
            if kind == "custom":
                raise ConfigError("profile: custom profiles have a fixed length; use ep-find for them")
            for M in self.M_list:
                if M % 2 or M < 4:
                    raise ConfigError(f"M_list: every M must be even and >= 4, got {M}")
        if self.command == "bulk-phase" and not self.u_list:
            raise ConfigError("u_list: required for bulk-phase")
        if self.command == "ep-sweep":
            for u in self.u_list:
                if not u > 1:
                    raise ConfigError(f"u_list: every u must exceed 1 for EP sweeps, got {u}")
        if self.command in ("ep-find", "wavefunction-compare", "ansatz-profile") and not self.ratio > 1:
            raise ConfigError(f"u: the edge ansatz needs u > 1, got {self.ratio}")
        if self.gamma_points < 0 or self.refine_points < 0:
            raise ConfigError("gamma_points, refine_points: must be >= 0")
        if self.gamma_min < 0 or self.gamma_max < self.gamma_min:
            raise ConfigError(f"gamma_min, gamma_max: need 0 <= gamma_min <= gamma_max, got {self.gamma_min}, {self.gamma_max}")
        if self.gamma < 0:
            raise ConfigError(f"gamma: must be >= 0, got {self.gamma}")
        if not self.tol > 0:
            raise ConfigError(f"tol: must be positive, got {self.tol}")
        if self.Nk < 64:
            raise ConfigError(f"Nk: must be >= 64, got {self.Nk}")
        if self.threads < 1:
            raise ConfigError(f"threads: must be >= 1, got {self.threads}")
        return self


FIELD_NAMES = tuple(f.name for f in fields(ExperimentConfig))


def _field_kind(name: str) -> str:
    return {
        "command": "str",
        "M": "int",
        "w": "float",
        "u": "float?",
        "v": "float?",
        "profile": "str",
        "profile_file": "str?",
        "seed": "int?",
        "gamma": "float",
        "gamma_min": "float",
        "gamma_max": "float",
        "gamma_points": "int",
        "gamma_relative": "bool",
        "refine_points": "int",
        "M_list": "int*",
        "u_list": "float*",
        "tol": "float",
        "Nk": "int",
        "out": "str?",
        "threads": "int",
        "plot": "str?",
    }[name]


def _parse_int(text: str) -> int:
    value = float(text) if any(c in text for c in ".eE") else int(text, 10)
    if isinstance(value, float):
        if not value.is_integer():
            raise ValueError(f"not an integer: {text!r}")
        value = int(value)
    return value


def _parse_int_list(text: str) -> tuple[int, ...]:
    # accepts "8, 10, 12" and ranges "8:30:2" (inclusive stop)
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ":" in part:
            bits = [_parse_int(b) for b in part.split(":")]
            start, stop = bits[0], bits[1]
            step = bits[2] if len(bits) > 2 else 1
            if step <= 0:
                raise ValueError(f"range step must be positive: {part!r}")
            out.extend(range(start, stop + 1, step))
        else:
            out.append(_parse_int(part))
    return tuple(out)


def parse_value(name: str, text: str) -> Any:
    """Convert the text of one config value to the field's type."""
    if name not in FIELD_NAMES:
        raise ConfigError(f"{name}: unknown key")
    kind = _field_kind(name)
    text = text.strip()
    optional = kind.endswith("?")
    if optional and text.lower() in ("", "none"):
        return None
    base = kind.rstrip("?")
    try:
        if base == "str":
            return text
        if base == "int":
            return _parse_int(text)
        if base == "float":
            return float(text)
        if base == "bool":
            low = text.lower()
            if low in ("true", "1", "yes"):
                return True
            if low in ("false", "0", "no"):
                return False
            raise ValueError(f"not a boolean: {text!r}")
        if base == "int*":
            return _parse_int_list(text)
        if base == "float*":
            return tuple(float(p) for p in text.split(",") if p.strip())
    except ValueError as exc:
        raise ConfigError(f"{name}: {exc}") from None
    raise AssertionError(kind)


def format_value(value: Any) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ", ".join(format_value(x) for x in value)
    return str(value)


def parse_config(text: str, source: str = "<config>", base: ExperimentConfig | None = None) -> ExperimentConfig:
    """Parse ``key = value`` lines (``#`` comments) on top of ``base``."""
    values: dict[str, Any] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        if key not in FIELD_NAMES:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        try:
            values[key] = parse_value(key, val)
        except ConfigError as exc:
            raise ConfigError(f"{source}:{lineno}: {exc}") from None
    return dataclasses.replace(base or ExperimentConfig(), **values)


def emit_config(config: ExperimentConfig, include_runtime: bool = True) -> str:
    lines = []
    for name in FIELD_NAMES:
        if not include_runtime and name in RUNTIME_KEYS:
            continue
        lines.append(f"{name} = {format_value(getattr(config, name))}")
    return "\n".join(lines) + "\n"


def load_config(path: str, base: ExperimentConfig | None = None) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), source=path, base=base)

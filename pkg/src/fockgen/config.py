"""Run configuration and its flat ``key = value`` file form.

Values are SI. Angular frequencies may carry a ``*2pi`` suffix, e.g.
``omega0 = 47e3*2pi``, which is multiplied out when the file is read.
``#`` starts a comment.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from fockgen.mode_profile import CavityParams
from fockgen.noise import DEFAULT_QUAD_ORDER, METHODS

FORMATS = ("csv", "json")
THREADS_ENV = "FOCKGEN_THREADS"

_PARAM_KEYS = tuple(f.name for f in fields(CavityParams))


@dataclass(frozen=True)
class RunConfig:
    params: CavityParams = field(default_factory=CavityParams)
    n_target: int = 6
    gamma: float = 0.1
    method: str = "analytic"
    trials: int = 100_000
    seed: int = 42
    quad_order: int = DEFAULT_QUAD_ORDER
    output_path: str | None = None
    output_format: str = "json"
    lam: float | None = None

    def __post_init__(self):
        if self.n_target < 1:
            raise ValueError(f"n must be >= 1, got {self.n_target}")
        if not (math.isfinite(self.gamma) and self.gamma >= 0):
            raise ValueError(f"gamma must be finite and >= 0, got {self.gamma}")
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {', '.join(METHODS)}, got {self.method!r}")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if self.seed < 0:
            raise ValueError(f"seed must be >= 0, got {self.seed}")
        if self.quad_order < 1:
            raise ValueError(f"quad-order must be >= 1, got {self.quad_order}")
        if self.output_format not in FORMATS:
            raise ValueError(f"format must be csv or json, got {self.output_format!r}")
        if self.lam is not None and not self.lam > 0:
            raise ValueError("lam must be positive")

    @property
    def coupling(self) -> float:
        """Constant coupling used by the noise model; defaults to omega0."""
        return self.params.omega0 if self.lam is None else self.lam

    def override(self, **values) -> "RunConfig":
        """Return a copy with flat keys replaced; ``None`` values are ignored."""
        values = {k: v for k, v in values.items() if v is not None}
        param_values = {k: values.pop(k) for k in list(values) if k in _PARAM_KEYS}
        params = replace(self.params, **param_values) if param_values else self.params
        return replace(self, params=params, **values)


# file key -> RunConfig field
_FILE_KEYS = {
    "n": "n_target",
    "gamma": "gamma",
    "method": "method",
    "trials": "trials",
    "seed": "seed",
    "quad_order": "quad_order",
    "out": "output_path",
    "format": "output_format",
    "lam": "lam",
}
_INT_FIELDS = {"n_target", "trials", "seed", "quad_order"}
_STR_FIELDS = {"method", "output_path", "output_format"}


def parse_quantity(text: str) -> float:
    """Parse a float, honouring a trailing ``*2pi``."""
    text = text.strip().replace(" ", "")
    scale = 1.0
    if text.lower().endswith("*2pi"):
        text = text[:-4]
        scale = 2.0 * math.pi
    return float(text) * scale


def parse_config_text(text: str) -> dict:
    """``key = value`` lines to RunConfig / CavityParams keyword values."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key in _PARAM_KEYS:
            out[key] = parse_quantity(value)
        elif key in _FILE_KEYS:
            name = _FILE_KEYS[key]
            if name in _INT_FIELDS:
                out[name] = int(value)
            elif name in _STR_FIELDS:
                out[name] = value
            else:
                out[name] = parse_quantity(value)
        else:
            raise ValueError(f"config line {lineno}: unknown key {key!r}")
    return out


def load_config(path: str | os.PathLike, base: RunConfig | None = None) -> RunConfig:
    values = parse_config_text(Path(path).read_text())
    return (base or RunConfig()).override(**values)


def dump_config(config: RunConfig) -> str:
    lines = [f"{k} = {getattr(config.params, k)!r}" for k in _PARAM_KEYS]
    for key, name in _FILE_KEYS.items():
        value = getattr(config, name)
        if value is None:
            continue
        lines.append(f"{key} = {value!r}" if isinstance(value, float) else f"{key} = {value}")
    return "\n".join(lines) + "\n"


def save_config(config: RunConfig, path: str | os.PathLike) -> None:
    Path(path).write_text(dump_config(config))


def worker_count() -> int:
    """Worker threads: CPU count, capped by ``FOCKGEN_THREADS`` when set."""
    n = os.cpu_count() or 1
    cap = os.environ.get(THREADS_ENV)
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            raise ValueError(f"{THREADS_ENV} must be an integer, got {cap!r}") from None
    return n

"""Run configuration: defaults, JSON documents and dotted-name overrides."""
from __future__ import annotations

import copy
import json
import math
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Sequence

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .errors import ConfigError

COMMANDS = ("decay-rate", "zeno-map", "nm-map", "rc-map", "oracle-check")
_HALF = 1 / math.sqrt(2)


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class AxisConfig(_Strict):
    name: str
    min: float
    max: float
    count: int = Field(ge=1)
    scale: Literal["linear", "log"] = "linear"

    @model_validator(mode="after")
    def _range(self):
        if self.count > 1 and not self.min < self.max:
            raise ValueError(f"axis {self.name}: min must be < max")
        if self.scale == "log" and not self.min > 0:
            raise ValueError(f"axis {self.name}: log scale needs min > 0")
        return self


class GridConfig(_Strict):
    x: AxisConfig
    y: AxisConfig


class SpectralConfig(_Strict):
    alpha: Optional[float] = Field(None, gt=0)
    coupling: float = Field(0.01, gt=0)
    delta_omega: float = Field(1.0, gt=0)
    tunneling: float = 2.0


class QuadratureConfig(_Strict):
    abs_tol: float = Field(1e-12, gt=0)
    rel_tol: float = Field(1e-9, gt=0)
    tail_tol: float = Field(1e-10, gt=0)
    max_subdivisions: int = Field(2000, gt=0)


class BellConfig(_Strict):
    a: float = _HALF
    b: float = _HALF

    @model_validator(mode="after")
    def _normalized(self):
        if abs(self.a**2 + self.b**2 - 1.0) > 1e-12:
            raise ValueError("bell: a^2 + b^2 must equal 1")
        return self


class RCConfig(_Strict):
    coupling: float = Field(1.0, gt=0)
    lambda_c: float = Field(0.0, ge=0)


class RunConfig(_Strict):
    command: Literal["decay-rate", "zeno-map", "nm-map", "rc-map", "oracle-check"]
    spectral: SpectralConfig = SpectralConfig()
    quadrature: QuadratureConfig = QuadratureConfig()
    bell: BellConfig = BellConfig()
    n_measurements: int = Field(20, ge=1)
    rc: RCConfig = RCConfig()
    tau: Optional[float] = Field(None, gt=0)
    tau1: Optional[float] = Field(None, ge=0)
    tau2: Optional[float] = Field(None, ge=0)
    partition: Literal["qq", "rr", "qr"] = "qq"
    grid: Optional[GridConfig] = None
    workers: int = Field(1, ge=1)
    out: str = "out"
    formats: List[Literal["csv", "json", "ppm", "svg"]] = ["csv", "json"]
    seed: int = Field(0, ge=0, lt=2**64)
    n_samples: int = Field(500, ge=1)

    @model_validator(mode="after")
    def _required(self):
        missing = []
        if self.command == "decay-rate":
            if self.tau is None:
                missing.append("tau")
            if self.spectral.alpha is None:
                missing.append("spectral.alpha")
        elif self.command == "nm-map":
            if self.spectral.alpha is None:
                missing.append("spectral.alpha")
        elif self.command == "rc-map":
            if self.tau is None:
                missing.append("tau")
        if missing:
            raise ValueError("missing required field(s): " + ", ".join(missing))
        return self


def _axis(name, lo, hi, count, scale):
    return {"name": name, "min": lo, "max": hi, "count": count, "scale": scale}


DEFAULT_GRIDS = {
    "zeno-map": {"x": _axis("tau", 0.02, 5.0, 50, "log"), "y": _axis("alpha", 0.05, 1.0, 50, "log")},
    "nm-map": {"x": _axis("tau1", 0.05, 5.0, 40, "log"), "y": _axis("tau2", 0.05, 5.0, 40, "log")},
    "rc-map": {"x": _axis("t", 0.0, 10.0, 40, "linear"), "y": _axis("lambda_c", 0.0, 3.0, 40, "linear")},
}


def defaults_for(command: str) -> Dict[str, Any]:
    d: Dict[str, Any] = {"command": command}
    if command in DEFAULT_GRIDS:
        d["grid"] = copy.deepcopy(DEFAULT_GRIDS[command])
    return d


def deep_merge(base: dict, extra: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in extra.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = deep_merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def parse_value(text: str) -> Any:
    """JSON literal if it parses (numbers, booleans, lists), else the raw string."""
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def set_dotted(doc: dict, dotted: str, value: Any) -> None:
    keys = dotted.split(".")
    if not all(keys):
        raise ConfigError(f"malformed option name {dotted!r}")
    node = doc
    for k in keys[:-1]:
        nxt = node.get(k)
        if nxt is None:
            nxt = node[k] = {}
        elif not isinstance(nxt, dict):
            raise ConfigError(f"{dotted}: {k!r} is not a section")
        node = nxt
    node[keys[-1]] = value


def parse_overrides(args: Sequence[str]) -> List[tuple]:
    """``--a.b 1 --c=2`` -> [("a.b", 1), ("c", 2)]."""
    pairs = []
    i = 0
    while i < len(args):
        tok = args[i]
        if not tok.startswith("--") or len(tok) <= 2:
            raise ConfigError(f"unexpected argument {tok!r}")
        name = tok[2:]
        if "=" in name:
            name, raw = name.split("=", 1)
            i += 1
        else:
            if i + 1 >= len(args):
                raise ConfigError(f"option --{name} needs a value")
            raw = args[i + 1]
            i += 2
        pairs.append((name.replace("-", "_"), parse_value(raw)))
    return pairs


def load_document(path: str) -> dict:
    """A config document, or a run sidecar whose ``config`` key holds one."""
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must hold a JSON object")
    if "config" in data and "code_version" in data:
        data = data["config"]
    return data


def build_config(command: str, path: Optional[str] = None, overrides: Sequence[tuple] = ()) -> RunConfig:
    """Layer defaults, the JSON document and dotted overrides, then validate."""
    doc = defaults_for(command)
    if path:
        doc = deep_merge(doc, load_document(path))
    for name, value in overrides:
        set_dotted(doc, name, value)
    doc["command"] = command
    try:
        return RunConfig.model_validate(doc)
    except ValidationError as exc:
        msgs = []
        for e in exc.errors():
            loc = ".".join(str(p) for p in e["loc"])
            msgs.append(f"{loc}: {e['msg']}" if loc else e["msg"])
        raise ConfigError("invalid configuration: " + "; ".join(msgs)) from None

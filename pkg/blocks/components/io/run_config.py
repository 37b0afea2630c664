# blocks/components/io/run_config.py
"""
Purpose
-------
Laufkonfiguration: knowledge/defaults.yml <- CLI-Flags, validiert als
pydantic-Modell und gegen die param_schema-Grenzen aus knowledge/policy.json.

Contracts
---------
class RunConfig(pydantic.BaseModel)
def load_defaults(path=DEFAULTS_PATH) -> dict
def load_policy(path=POLICY_PATH) -> dict
def parse_t_grid(text) -> list[float]
def build_config(subcommand, overrides, defaults_path=..., policy_path=...) -> RunConfig

Raises
------
UsageError
    Unbekannter Subcommand, Grenzverletzung, unsortiertes oder kaputtes
    t-Gitter ("A:B:STEP" oder Kommaliste), t und t-grid gleichzeitig.

Side Effects
------------
Liest defaults.yml und policy.json.

Notes
-----
- echo() liefert nur die fachlichen Parameter (ohne workers, Pfade,
  Log-Level); Berichte bleiben damit bytegleich über Worker-Zahlen.
"""

from __future__ import annotations

import json
import logging
import math
import pathlib
from typing import Any, Dict, List, Literal, Mapping, Optional, Tuple, Union

import yaml
from pydantic import BaseModel, ConfigDict, ValidationError, field_validator, model_validator

from blocks.components.util.errors import UsageError

logger = logging.getLogger(__name__)

BASE_DIR = pathlib.Path(__file__).resolve().parents[3]
KNOWLEDGE_DIR = BASE_DIR / "knowledge"
DEFAULTS_PATH = KNOWLEDGE_DIR / "defaults.yml"
POLICY_PATH = KNOWLEDGE_DIR / "policy.json"

SUBCOMMANDS = ("dim", "pressure", "measure", "verify", "render", "boxdim")
ECHO_EXCLUDE = {"workers", "out", "cache", "use_cache", "log_level", "plot", "points", "ifs"}


def parse_t_grid(text: str) -> List[float]:
    """'A:B:STEP' (inclusive) or 'a,b,c'; must be strictly ascending."""
    s = str(text).strip()
    try:
        if ":" in s:
            parts = [float(p) for p in s.split(":")]
            if len(parts) != 3:
                raise UsageError(f"t grid must look like A:B:STEP, got {text!r}")
            a, b, step = parts
            if not step > 0 or b < a:
                raise UsageError(f"t grid {text!r} is not ascending")
            count = int(math.floor((b - a) / step + 1e-9))
            grid = [a + i * step for i in range(count + 1)]
        else:
            grid = [float(p) for p in s.split(",") if p.strip()]
    except ValueError as e:
        if isinstance(e, UsageError):
            raise
        raise UsageError(f"malformed t grid {text!r}: {e}") from e
    if not grid:
        raise UsageError("t grid must not be empty")
    if any(y <= x for x, y in zip(grid, grid[1:])):
        raise UsageError(f"t grid must be sorted ascending, got {grid}")
    return grid


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    subcommand: Literal["dim", "pressure", "measure", "verify", "render", "boxdim"]
    ifs: Optional[pathlib.Path] = None
    t: Optional[float] = None
    t_grid: List[float]
    nmax: int
    depth: int
    tol: float
    seed: int
    workers: int
    budget: int
    kind: Literal["natural", "product"]
    tail: Literal["repeat", "drop"]
    driver: Literal["uniform", "equilibrium"]
    count: int
    burn_in: int
    resolution: int
    samples: int
    iterations: int
    trials: int
    radius: float
    levels: List[int]
    cache: Optional[pathlib.Path] = None
    use_cache: bool = True
    out: pathlib.Path
    plot: bool = False
    points: bool = False
    log_level: str = "WARNING"

    @field_validator("tol")
    @classmethod
    def _tol_positive(cls, v: float) -> float:
        if not v > 0:
            raise ValueError("tolerance must be > 0")
        return v

    @field_validator("nmax", "workers")
    @classmethod
    def _at_least_one(cls, v: int) -> int:
        if v < 1:
            raise ValueError("must be >= 1")
        return v

    @field_validator("t_grid")
    @classmethod
    def _grid_sorted(cls, v: List[float]) -> List[float]:
        if not v:
            raise ValueError("t grid must not be empty")
        if any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError(f"t grid must be sorted ascending, got {v}")
        return v

    @field_validator("levels")
    @classmethod
    def _levels_pair(cls, v: List[int]) -> List[int]:
        if len(v) != 2 or v[1] - v[0] < 2:
            raise ValueError("levels must be [j_min, j_max] spanning at least 3 scales")
        return v

    @model_validator(mode="after")
    def _depth_within_levels(self) -> "RunConfig":
        if self.subcommand in ("measure",) and self.depth > self.nmax:
            raise ValueError(f"depth {self.depth} exceeds nmax {self.nmax}")
        return self

    @property
    def grid(self) -> List[float]:
        return [float(self.t)] if self.t is not None else list(self.t_grid)

    def echo(self) -> Dict[str, Any]:
        data = self.model_dump(exclude=ECHO_EXCLUDE)
        if self.ifs is not None:
            data["ifs_file"] = self.ifs.name
        return {k: v for k, v in data.items() if v is not None}


def load_defaults(path: Union[str, pathlib.Path] = DEFAULTS_PATH) -> Dict[str, Any]:
    p = pathlib.Path(path)
    if not p.exists():
        raise UsageError(f"defaults not found: {p}")
    data = yaml.safe_load(p.read_text(encoding="utf-8")) or {}
    return dict(data.get("defaults", {}))


def load_policy(path: Union[str, pathlib.Path] = POLICY_PATH) -> Dict[str, Any]:
    p = pathlib.Path(path)
    if not p.exists():
        return {}
    return json.loads(p.read_text(encoding="utf-8"))


_TYPES: Dict[str, Tuple[type, ...]] = {"int": (int,), "float": (int, float), "string": (str,)}


def _check_policy(values: Mapping[str, Any], policy: Mapping[str, Any]) -> None:
    for name, rule in (policy.get("param_schema") or {}).items():
        v = values.get(name)
        if v is None:
            continue
        allowed = _TYPES.get(rule.get("type", ""))
        if allowed is not None and (isinstance(v, bool) or not isinstance(v, allowed)):
            raise UsageError(f"{name}={v!r} is not of type {rule['type']}")
        if not isinstance(v, (int, float)):
            continue
        if "min" in rule and v < rule["min"]:
            raise UsageError(f"{name}={v} below minimum {rule['min']}")
        if "max" in rule and v > rule["max"]:
            raise UsageError(f"{name}={v} above maximum {rule['max']}")


def _check_mutex(given: Mapping[str, Any], policy: Mapping[str, Any]) -> None:
    # nur explizit gesetzte Werte zählen; defaults.yml setzt t_grid immer
    for group in policy.get("mutex") or []:
        present = [name for name in group if given.get(name) is not None]
        if len(present) > 1:
            flags = " and ".join(f"--{name.replace('_', '-')}" for name in present)
            raise UsageError(f"{flags} are mutually exclusive")


def build_config(
    subcommand: str,
    overrides: Mapping[str, Any],
    defaults_path: Union[str, pathlib.Path] = DEFAULTS_PATH,
    policy_path: Union[str, pathlib.Path] = POLICY_PATH,
) -> RunConfig:
    if subcommand not in SUBCOMMANDS:
        raise UsageError(f"unknown subcommand {subcommand!r}; expected one of {', '.join(SUBCOMMANDS)}")
    merged: Dict[str, Any] = load_defaults(defaults_path)
    given = {k: v for k, v in overrides.items() if v is not None}
    policy = load_policy(policy_path)
    _check_mutex(given, policy)
    if isinstance(given.get("t_grid"), str):
        given["t_grid"] = parse_t_grid(given["t_grid"])
    merged.update(given)
    merged["subcommand"] = subcommand

    _check_policy(merged, policy)
    required = ((policy.get("subcommands") or {}).get(subcommand) or {}).get("requires", [])
    for name in required:
        if merged.get(name) in (None, ""):
            raise UsageError(f"{subcommand} requires --{name.replace('_', '-')}")
    try:
        cfg = RunConfig.model_validate(merged)
    except ValidationError as e:
        first = e.errors()[0]
        field = ".".join(str(p) for p in first.get("loc", ()))
        raise UsageError(f"invalid configuration: {field}: {first.get('msg')}") from e
    logger.debug("config: %s", cfg.model_dump())
    return cfg

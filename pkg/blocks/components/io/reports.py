# blocks/components/io/reports.py
"""
Purpose
-------
Berichte als flacher "key = value"-Text plus CSV-Seitendateien.

Contracts
---------
TOOL_VERSION : str
def format_value(v) -> str
def render_report(subcommand, config_echo, ifs_hash, values) -> str
def write_report(path, subcommand, config_echo, ifs_hash, values) -> pathlib.Path
def write_csv(frame, path) -> pathlib.Path
def write_bytes(data, path) -> pathlib.Path

Returns
-------
Text: tool_version, subcommand, ifs_hash, config.<key> (sortiert), danach
die Werte in Einfügereihenfolge.

Side Effects
------------
Schreibt Dateien (Elternordner werden angelegt), INFO-Log pro Datei.

Notes
-----
- Gleitkommazahlen mit 17 signifikanten Stellen ("%.17g"), in Text und CSV.
- Zeilenende immer "\\n"; keine Zeitstempel, keine Laufzeiten.
"""

from __future__ import annotations

import logging
import math
import pathlib
from typing import Any, Dict, Mapping, Union

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

TOOL_VERSION = "0.3.0"
FLOAT_FORMAT = "%.17g"


def format_value(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        f = float(v)
        if math.isnan(f):
            return "nan"
        if math.isinf(f):
            return "inf" if f > 0 else "-inf"
        return FLOAT_FORMAT % f
    if isinstance(v, (list, tuple, np.ndarray)):
        return ",".join(format_value(x) for x in v)
    if isinstance(v, pathlib.Path):
        return v.as_posix()
    return str(v).replace("\n", " ")


def render_report(
    subcommand: str,
    config_echo: Mapping[str, Any],
    ifs_hash: str,
    values: Mapping[str, Any],
) -> str:
    lines = [
        f"tool_version = {TOOL_VERSION}",
        f"subcommand = {subcommand}",
        f"ifs_hash = {ifs_hash}",
    ]
    for key in sorted(config_echo):
        lines.append(f"config.{key} = {format_value(config_echo[key])}")
    for key, value in values.items():
        lines.append(f"{key} = {format_value(value)}")
    return "\n".join(lines) + "\n"


def _target(path: Union[str, pathlib.Path]) -> pathlib.Path:
    p = pathlib.Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    return p


def write_report(
    path: Union[str, pathlib.Path],
    subcommand: str,
    config_echo: Mapping[str, Any],
    ifs_hash: str,
    values: Mapping[str, Any],
) -> pathlib.Path:
    p = _target(path)
    with p.open("w", encoding="utf-8", newline="\n") as fh:
        fh.write(render_report(subcommand, config_echo, ifs_hash, values))
    logger.info("wrote %s", p)
    return p


def write_csv(frame: pd.DataFrame, path: Union[str, pathlib.Path]) -> pathlib.Path:
    p = _target(path)
    frame.to_csv(p, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    logger.info("wrote %s (%d rows)", p, len(frame))
    return p


def write_bytes(data: bytes, path: Union[str, pathlib.Path]) -> pathlib.Path:
    p = _target(path)
    p.write_bytes(data)
    logger.info("wrote %s (%d bytes)", p, len(data))
    return p


def flatten(prefix: str, values: Dict[str, Any]) -> Dict[str, Any]:
    """{"a": 1} -> {"prefix.a": 1}."""
    return {f"{prefix}.{k}": v for k, v in values.items()}

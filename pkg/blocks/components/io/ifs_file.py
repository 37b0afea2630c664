# blocks/components/io/ifs_file.py
"""
Purpose
-------
IFS-Dokumente (UTF-8 JSON) lesen und schreiben:

  { "name": str, "dimension": int,
    "maps": [ { "matrix": [[...], ...], "translation": [...] }, ... ] }

Contracts
---------
def parse_ifs_text(text, path="<string>", validate=True) -> AffineIFS
def parse_ifs_file(path, validate=True) -> AffineIFS
def serialize_ifs(ifs) -> str
def write_ifs_file(ifs, path) -> pathlib.Path

Raises
------
IfsFormatError
    Kaputtes JSON, Schemafehler, Dimensionsfehler, singuläre oder nicht
    kontrahierende Matrix. Meldung: "<path>:<line>: map <i>: <problem>".

Side Effects
------------
parse_ifs_file liest, write_ifs_file schreibt eine Datei. Warnungen der
Validierung (Norm-1/2) gehen ins Log.

Notes
-----
- Zeilenanker für Abbildung i ist die Zeile des i-ten "matrix"-Schlüssels.
- serialize_ifs schreibt eine Abbildung pro Zeile; Zahlen über repr, d. h.
  parse(serialize(ifs)) == ifs bitgenau.
"""

from __future__ import annotations

import json
import logging
import pathlib
import re
from typing import List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from blocks.components.affine.ifs_model import AffineIFS, ensure_valid
from blocks.components.linalg.singular_values import MAX_DIM, singular_values
from blocks.components.util.errors import DomainError, IfsFormatError, IfsValidationError, NumericallySingularError

logger = logging.getLogger(__name__)

_MATRIX_KEY = re.compile(r'"matrix"\s*:')


class MapDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    matrix: List[List[float]]
    translation: List[float]


class IfsDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str = ""
    dimension: int = Field(ge=1, le=MAX_DIM)
    maps: List[MapDocument] = Field(min_length=1)


def _map_lines(text: str) -> List[int]:
    """1-based line of every "matrix" key, in document order."""
    return [text.count("\n", 0, m.start()) + 1 for m in _MATRIX_KEY.finditer(text)]


def _line_of(lines: List[int], index: Optional[int], default: int = 1) -> int:
    if index is not None and 0 <= index < len(lines):
        return lines[index]
    return default


def parse_ifs_text(text: str, path: str = "<string>", validate: bool = True) -> AffineIFS:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise IfsFormatError(f"invalid JSON: {e.msg}", line=e.lineno, path=path) from e

    lines = _map_lines(text)
    try:
        doc = IfsDocument.model_validate(raw)
    except ValidationError as e:
        first = e.errors()[0]
        loc = first.get("loc", ())
        index = loc[1] if len(loc) > 1 and loc[0] == "maps" and isinstance(loc[1], int) else None
        where = f"map {index}: " if index is not None else ""
        field = ".".join(str(p) for p in loc)
        raise IfsFormatError(f"{where}{field}: {first.get('msg')}", line=_line_of(lines, index), path=path) from e

    d = doc.dimension
    for i, mp in enumerate(doc.maps):
        line = _line_of(lines, i)
        if len(mp.matrix) != d:
            raise IfsFormatError(f"map {i}: matrix has {len(mp.matrix)} rows, dimension is {d}", line=line, path=path)
        for r, row in enumerate(mp.matrix):
            if len(row) != d:
                raise IfsFormatError(f"map {i}: matrix row {r} has length {len(row)}, dimension is {d}", line=line, path=path)
        if len(mp.translation) != d:
            raise IfsFormatError(
                f"map {i}: translation has length {len(mp.translation)}, dimension is {d}", line=line, path=path
            )
        if validate:
            try:
                spectrum = singular_values(mp.matrix)
            except (NumericallySingularError, DomainError) as e:
                raise IfsFormatError(f"map {i}: {e}", line=line, path=path) from e
            if spectrum.top >= 1.0:
                raise IfsFormatError(f"map {i}: not contractive (alpha_1 = {spectrum.top:.6g})", line=line, path=path)

    ifs = AffineIFS(
        [mp.matrix for mp in doc.maps],
        [mp.translation for mp in doc.maps],
        name=doc.name,
    )
    if validate:
        try:
            ensure_valid(ifs)
        except IfsValidationError as e:
            raise IfsFormatError(str(e), line=1, path=path) from e
    logger.debug("parsed %s: %r", path, ifs)
    return ifs


def parse_ifs_file(path: Union[str, pathlib.Path], validate: bool = True) -> AffineIFS:
    p = pathlib.Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as e:
        raise IfsFormatError(f"cannot read IFS file: {e.strerror}", path=str(p)) from e
    except UnicodeDecodeError as e:
        raise IfsFormatError(f"not UTF-8 text (byte {e.start})", path=str(p)) from e
    return parse_ifs_text(text, path=str(p), validate=validate)


def serialize_ifs(ifs: AffineIFS) -> str:
    maps = [
        "    " + json.dumps({"matrix": A.tolist(), "translation": a.tolist()})
        for A, a in zip(ifs.matrices, ifs.translations)
    ]
    return (
        "{\n"
        f'  "name": {json.dumps(ifs.name)},\n'
        f'  "dimension": {ifs.d},\n'
        '  "maps": [\n'
        + ",\n".join(maps)
        + "\n  ]\n}\n"
    )


def write_ifs_file(ifs: AffineIFS, path: Union[str, pathlib.Path]) -> pathlib.Path:
    p = pathlib.Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(serialize_ifs(ifs), encoding="utf-8")
    return p

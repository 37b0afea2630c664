# blocks/components/io/cache.py
"""
Purpose
-------
Persistenter Cache für log-Zustandssummen. Eine JSON-Lines-Datei, nur
angehängt; Schlüssel (Hash der Zylinderfunktion, Bitmuster von t, n).

Contracts
---------
class PartitionSumCache(path)
    get(cf_hash, t, n) -> float | None
    put(cf_hash, t, n, value) -> None
    __len__()

Side Effects
------------
Liest die Datei beim Öffnen, hängt bei put eine Zeile an.

Notes
-----
- Werte werden als float.hex gespeichert: get liefert exakt die Bits von put.
- Kaputte Zeilen werden mit WARNING übersprungen; eine abgeschnittene letzte
  Zeile wird vor dem nächsten Anhängen mit einem Zeilenumbruch abgeschlossen.
- Schreibzugriffe laufen unter einem Lock; Leser sehen nur das Dict im
  Speicher.
"""

from __future__ import annotations

import json
import logging
import pathlib
import threading
from typing import Dict, Optional, Tuple, Union

logger = logging.getLogger(__name__)

Key = Tuple[str, str, int]


def _key(cf_hash: str, t: float, n: int) -> Key:
    return (str(cf_hash), float(t).hex(), int(n))


class PartitionSumCache:
    def __init__(self, path: Union[str, pathlib.Path]) -> None:
        self.path = pathlib.Path(path)
        self._lock = threading.RLock()
        self._data: Dict[Key, float] = {}
        self._needs_newline = False
        self._load()

    def _load(self) -> None:
        if not self.path.exists():
            return
        raw = self.path.read_text(encoding="utf-8")
        self._needs_newline = bool(raw) and not raw.endswith("\n")
        skipped = 0
        for lineno, line in enumerate(raw.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                key = (str(rec["h"]), str(rec["t"]), int(rec["n"]))
                float.fromhex(key[1])
                self._data[key] = float.fromhex(rec["v"])
            except (ValueError, KeyError, TypeError) as e:
                skipped += 1
                logger.warning("%s:%d: corrupted cache record skipped (%s)", self.path, lineno, e)
        logger.info("cache %s: %d records, %d skipped", self.path, len(self._data), skipped)

    def __len__(self) -> int:
        return len(self._data)

    def get(self, cf_hash: str, t: float, n: int) -> Optional[float]:
        return self._data.get(_key(cf_hash, t, n))

    def put(self, cf_hash: str, t: float, n: int, value: float) -> None:
        key = _key(cf_hash, t, n)
        with self._lock:
            if key in self._data:
                return
            self._data[key] = float(value)
            record = json.dumps({"h": key[0], "t": key[1], "n": key[2], "v": float(value).hex()})
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with self.path.open("a", encoding="utf-8") as fh:
                if self._needs_newline:
                    fh.write("\n")
                    self._needs_newline = False
                fh.write(record + "\n")

# blocks/components/util/parallel.py
"""
Purpose
-------
Reihenfolgetreues Map über Prozesse. Ergebnisse kommen immer in der
Reihenfolge der Eingaben zurück, egal welcher Worker zuerst fertig ist;
Reduktionen danach laufen sequentiell in dieser Reihenfolge.

Contracts
---------
def ordered_map(fn, items, workers: int = 1) -> list

Notes
-----
- workers == 1 rechnet im aktuellen Prozess (kein Pool-Start).
- fn und items müssen picklebar sein, sobald workers > 1.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Callable, Iterable, List

logger = logging.getLogger(__name__)


def ordered_map(fn: Callable[[Any], Any], items: Iterable[Any], workers: int = 1) -> List[Any]:
    """Apply fn to every item; results in input order."""
    work = list(items)
    workers = int(workers)
    if workers < 1:
        raise ValueError("workers must be >= 1")
    if workers == 1 or len(work) <= 1:
        return [fn(item) for item in work]
    n_proc = min(workers, len(work))
    logger.debug("ordered_map: %d items on %d processes", len(work), n_proc)
    with ProcessPoolExecutor(max_workers=n_proc) as pool:
        return list(pool.map(fn, work))

# blocks/components/pressure/dimension.py
"""
Purpose
-------
Nullstellen t_n von P_n(t) (Bisektion) und der Affinitätsdimensions-Bericht
für ein affines IFS.

Contracts
---------
def root_bracket(cf, n, t_tol, ...) -> tuple[float, float]
def pressure_root(cf, n, t_tol, ...) -> float
def affinity_dimension(ifs, n_max, t_tol, ...) -> DimensionReport

Returns
-------
pressure_root : Mittelpunkt der letzten Klammer (Breite <= t_tol)
DimensionReport : roots, upper_bound = min t_n, extrapolated, prediction =
                  min(d, upper_bound), norm_half_ok, partial

Raises
------
DomainError
    t_tol <= 0, n < 1.

Side Effects
------------
Logging (INFO pro Ebene, DEBUG pro Bisektionsschritt). Die Wandzeit steht nur
im Objekt (elapsed_s) und im Log, nie in serialisierten Berichten.

Notes
-----
- Klammer startet bei [0, 1]; die obere Grenze wird verdoppelt bis P_n < 0.
  P_n(0) = log #I > 0 garantiert die Existenz der Nullstelle.
- Bei Budgetabbruch enthält der Bericht die bis dahin berechneten Ebenen.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import pandas as pd

from blocks.components.affine.ifs_model import AffineIFS, ensure_valid
from blocks.components.cylinder.cylinder_function import CylinderFunction, NaturalCylinderFunction
from blocks.components.pressure.partition_sum import (
    ESTIMATE_LABEL,
    FEKETE_LABEL,
    METHOD_LAST,
    extrapolate_inverse_n,
    log_partition_sum,
)
from blocks.components.symbolic.words import DEFAULT_BUDGET
from blocks.components.util.errors import BudgetExceededError, DomainError

logger = logging.getLogger(__name__)

MAX_DOUBLINGS = 60


def root_bracket(
    cf: CylinderFunction,
    n: int,
    t_tol: float,
    workers: int = 1,
    budget: int = DEFAULT_BUDGET,
    cache: Optional[Any] = None,
) -> Tuple[float, float]:
    """[lo, hi] with P_n(lo) >= 0 > P_n(hi) and hi - lo <= t_tol."""
    if not t_tol > 0:
        raise DomainError(f"t_tol must be > 0, got {t_tol}")
    if n < 1:
        raise DomainError(f"level must be >= 1, got {n}")

    def lse(t: float) -> float:
        return log_partition_sum(cf, t, n, workers=workers, budget=budget, cache=cache)

    lo, hi = 0.0, 1.0
    for _ in range(MAX_DOUBLINGS):
        if lse(hi) < 0:
            break
        lo, hi = hi, 2.0 * hi
    else:
        raise DomainError(f"no sign change of P_{n} below t={hi}")

    steps = 0
    while hi - lo > t_tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if lse(mid) < 0:
            hi = mid
        else:
            lo = mid
        steps += 1
        logger.debug("bisection n=%d step %d: [%.17g, %.17g]", n, steps, lo, hi)
    return lo, hi


def pressure_root(
    cf: CylinderFunction,
    n: int,
    t_tol: float,
    workers: int = 1,
    budget: int = DEFAULT_BUDGET,
    cache: Optional[Any] = None,
) -> float:
    lo, hi = root_bracket(cf, n, t_tol, workers=workers, budget=budget, cache=cache)
    return 0.5 * (lo + hi)


@dataclass
class DimensionReport:
    name: str
    d: int
    t_tol: float
    roots: List[Tuple[int, float]] = field(default_factory=list)
    upper_bound: float = float("nan")
    extrapolated: float = float("nan")
    method: str = METHOD_LAST
    prediction: float = float("nan")
    norm_half_ok: bool = False
    warnings: List[str] = field(default_factory=list)
    partial: bool = False
    stopped_at: Optional[int] = None
    elapsed_s: float = 0.0

    @property
    def levels(self) -> List[int]:
        return [n for n, _ in self.roots]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"n": self.levels, "t_n": [t for _, t in self.roots]})

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "d": self.d,
            "t_tol": self.t_tol,
            "levels": len(self.roots),
            "upper_bound": self.upper_bound,
            "upper_bound_label": FEKETE_LABEL,
            "extrapolated": self.extrapolated,
            "extrapolated_label": ESTIMATE_LABEL,
            "extrapolation_method": self.method,
            "prediction": self.prediction,
            "norm_half_ok": self.norm_half_ok,
            "partial": self.partial,
            "stopped_at": self.stopped_at if self.stopped_at is not None else "",
        }


def affinity_dimension(
    ifs: AffineIFS,
    n_max: int,
    t_tol: float,
    workers: int = 1,
    budget: int = DEFAULT_BUDGET,
    cache: Optional[Any] = None,
) -> DimensionReport:
    """Roots of P_n for the natural cylinder function, n = 1..n_max."""
    if n_max < 1:
        raise DomainError(f"n_max must be >= 1, got {n_max}")
    validation = ensure_valid(ifs)
    cf = NaturalCylinderFunction(ifs)
    report = DimensionReport(
        name=ifs.name,
        d=ifs.d,
        t_tol=float(t_tol),
        norm_half_ok=validation.norm_half_ok,
        warnings=list(validation.warnings),
    )
    start = time.perf_counter()
    for n in range(1, int(n_max) + 1):
        t0 = time.perf_counter()
        try:
            t_n = pressure_root(cf, n, t_tol, workers=workers, budget=budget, cache=cache)
        except BudgetExceededError as e:
            logger.warning("affinity_dimension stopped at level %d: %s", n, e)
            report.partial, report.stopped_at = True, n
            break
        report.roots.append((n, t_n))
        logger.info("level %d: t_n=%.12g (%.3fs)", n, t_n, time.perf_counter() - t0)
    report.elapsed_s = time.perf_counter() - start

    if report.roots:
        values = [t for _, t in report.roots]
        report.upper_bound = min(values)
        report.extrapolated, report.method = extrapolate_inverse_n(report.levels, values)
        report.prediction = min(float(ifs.d), report.upper_bound)
    if not report.norm_half_ok:
        logger.warning("%s: norm < 1/2 hypothesis fails; prediction is an upper bound only", ifs.name or "ifs")
    logger.info("dimension prediction %.12g after %.3fs", report.prediction, report.elapsed_s)
    return report

# blocks/components/pressure/partition_sum.py
"""
Purpose
-------
Zustandssummen S_n(t) = sum_{|i|=n} psi_i^t, endliche Druckwerte
P_n(t) = (1/n) log S_n(t), Fekete-Hülle und Druckkurven.

Contracts
---------
def log_partition_sum(cf, t, n, workers=1, budget=DEFAULT_BUDGET, cache=None) -> float
def table_log_sum(table, t) -> float
def finite_pressure(cf, t, n, ...) -> float
def pressure_sequence(cf, t, n_max, ...) -> PressureReport
def pressure_curve(cf, t_grid, n, ...) -> pandas.DataFrame[t, n, P_n]
def similarity_pressure(weights, t) -> float
def generalized_subadditive_check(values) -> SubadditivityCheck
def extrapolate_inverse_n(levels, values) -> tuple[float, str]

Args
----
cache : optional PartitionSumCache (io/cache.py); Schlüssel
        (cf.content_hash(), Bitmuster von t, n)

Returns
-------
PressureReport : per_level [(n, P_n)], fekete_upper (rigorose obere Schranke
                 bei K_t = 1), extrapolated (Schätzung) + Methodenkennung

Raises
------
BudgetExceededError
    log_partition_sum, wenn #I^n das Budget übersteigt. pressure_sequence
    fängt das ab und liefert einen als partial markierten Bericht.
UsageError
    pressure_curve mit unsortiertem Gitter.

Notes
-----
- Reduktion: logsumexp pro Präfixblock (scipy), danach sequentiell in
  Blockreihenfolge mit numpy.logaddexp. Die Blockgrenzen hängen nur von n ab;
  das Ergebnis ist damit bitgleich für jede Worker-Zahl.
- Die Extrapolation ist eine Kleinste-Quadrate-Anpassung P_n ~ a + b/n über
  die obere Hälfte der Ebenen und wird nie anstelle der Fekete-Schranke
  berichtet.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.special import logsumexp

from blocks.components.cylinder.cylinder_function import CylinderFunction, LevelTable
from blocks.components.symbolic.words import DEFAULT_BUDGET, check_budget
from blocks.components.util.errors import BudgetExceededError, DomainError, UsageError

logger = logging.getLogger(__name__)

METHOD_LSQ = "lsq-inverse-n"
METHOD_LAST = "last-level"
FEKETE_LABEL = "rigorous upper bound"
ESTIMATE_LABEL = "estimate"


def table_log_sum(table: LevelTable, t: float) -> float:
    """log of the level sum, block by block in lexicographic order."""
    values = table.log_values(t)
    acc = -math.inf
    for sl in table.block_slices():
        acc = float(np.logaddexp(acc, logsumexp(values[sl])))
    return acc


def log_partition_sum(
    cf: CylinderFunction,
    t: float,
    n: int,
    workers: int = 1,
    budget: int = DEFAULT_BUDGET,
    cache: Optional[Any] = None,
) -> float:
    if n < 1:
        raise DomainError(f"level must be >= 1, got {n}")
    check_budget(cf.alphabet, n, budget)
    key = None
    if cache is not None:
        key = (cf.content_hash(), float(t), int(n))
        hit = cache.get(*key)
        if hit is not None:
            logger.debug("cache hit: n=%d t=%r", n, t)
            return hit
    table = cf.level_table(n, workers=workers, budget=budget)
    value = table_log_sum(table, t)
    if cache is not None and key is not None:
        cache.put(*key, value)
    return value


def finite_pressure(
    cf: CylinderFunction,
    t: float,
    n: int,
    workers: int = 1,
    budget: int = DEFAULT_BUDGET,
    cache: Optional[Any] = None,
) -> float:
    """P_n(t) = (1/n) log S_n(t)."""
    return log_partition_sum(cf, t, n, workers=workers, budget=budget, cache=cache) / n


def similarity_pressure(weights: Sequence[float], t: float) -> float:
    """log sum_i s_i^t; equals P_n(t) for every n in the chain-rule case."""
    w = np.asarray(weights, dtype=float)
    if w.size < 1 or np.any(w <= 0):
        raise DomainError("similarity weights must be positive")
    return float(logsumexp(float(t) * np.log(w)))


def extrapolate_inverse_n(levels: Sequence[int], values: Sequence[float]) -> Tuple[float, str]:
    """Fit v_n ~ a + b/n over the upper half of the levels; return (a, method)."""
    n = np.asarray(levels, dtype=float)
    v = np.asarray(values, dtype=float)
    if n.size == 0:
        return float("nan"), METHOD_LAST
    top = slice(n.size // 2, None)
    n_top, v_top = n[top], v[top]
    if np.unique(n_top).size < 2:
        return float(v[-1]), METHOD_LAST
    X = np.column_stack([np.ones_like(n_top), 1.0 / n_top])
    beta, *_ = np.linalg.lstsq(X, v_top, rcond=None)
    return float(beta[0]), METHOD_LSQ


@dataclass
class SubadditivityCheck:
    worst_slack: float
    worst_pair: Optional[Tuple[int, int]]
    checked: int

    def holds(self, tol: float = 1e-10) -> bool:
        return self.worst_slack <= tol


def generalized_subadditive_check(values: Sequence[float]) -> SubadditivityCheck:
    """values[k-1] = a(k). Worst slack of a(n+m) - a(n) - a(m) over all valid pairs."""
    a = [float(v) for v in values]
    worst, pair, checked = -math.inf, None, 0
    for n in range(1, len(a) + 1):
        for m in range(n, len(a) + 1 - n):
            slack = a[n + m - 1] - a[n - 1] - a[m - 1]
            checked += 1
            if slack > worst:
                worst, pair = slack, (n, m)
    return SubadditivityCheck(worst_slack=worst, worst_pair=pair, checked=checked)


@dataclass
class PressureReport:
    t: float
    kind: str
    per_level: List[Tuple[int, float]] = field(default_factory=list)
    log_sums: List[float] = field(default_factory=list)
    fekete_upper: float = float("nan")
    extrapolated: float = float("nan")
    method: str = METHOD_LAST
    partial: bool = False
    stopped_at: Optional[int] = None

    @property
    def levels(self) -> List[int]:
        return [n for n, _ in self.per_level]

    @property
    def values(self) -> List[float]:
        return [p for _, p in self.per_level]

    def fekete_envelope(self) -> List[float]:
        """min_{k <= n} P_k for each computed n."""
        return [float(v) for v in np.minimum.accumulate(self.values)] if self.per_level else []

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {"t": [self.t] * len(self.per_level), "n": self.levels, "P_n": self.values}
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "t": self.t,
            "kind": self.kind,
            "levels": len(self.per_level),
            "fekete_upper": self.fekete_upper,
            "fekete_upper_label": FEKETE_LABEL,
            "extrapolated": self.extrapolated,
            "extrapolated_label": ESTIMATE_LABEL,
            "extrapolation_method": self.method,
            "partial": self.partial,
            "stopped_at": self.stopped_at if self.stopped_at is not None else "",
        }


def pressure_sequence(
    cf: CylinderFunction,
    t: float,
    n_max: int,
    workers: int = 1,
    budget: int = DEFAULT_BUDGET,
    cache: Optional[Any] = None,
) -> PressureReport:
    if n_max < 1:
        raise DomainError(f"n_max must be >= 1, got {n_max}")
    report = PressureReport(t=float(t), kind=cf.kind)
    for n in range(1, int(n_max) + 1):
        try:
            lse = log_partition_sum(cf, t, n, workers=workers, budget=budget, cache=cache)
        except BudgetExceededError as e:
            logger.warning("pressure_sequence stopped at level %d: %s", n, e)
            report.partial, report.stopped_at = True, n
            break
        report.log_sums.append(lse)
        report.per_level.append((n, lse / n))
        logger.info("t=%g level %d: P_n=%.12g", t, n, lse / n)
    if report.per_level:
        report.fekete_upper = min(report.values)
        report.extrapolated, report.method = extrapolate_inverse_n(report.levels, report.values)
    return report


def check_grid(t_grid: Sequence[float]) -> List[float]:
    grid = [float(t) for t in t_grid]
    if not grid:
        raise UsageError("t grid must not be empty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise UsageError(f"t grid must be strictly ascending, got {grid}")
    if grid[0] < 0:
        raise UsageError("t grid values must be >= 0")
    return grid


def pressure_curve(
    cf: CylinderFunction,
    t_grid: Sequence[float],
    n: int,
    workers: int = 1,
    budget: int = DEFAULT_BUDGET,
    cache: Optional[Any] = None,
) -> pd.DataFrame:
    """P_n sampled on an ascending grid; columns t, n, P_n."""
    grid = check_grid(t_grid)
    values = [finite_pressure(cf, t, n, workers=workers, budget=budget, cache=cache) for t in grid]
    return pd.DataFrame({"t": grid, "n": [int(n)] * len(grid), "P_n": values})

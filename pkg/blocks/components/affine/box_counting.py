# blocks/components/affine/box_counting.py
"""
Purpose
-------
Box-Counting-Dimension einer Punktwolke als numerische Gegenprobe zur
Affinitätsdimension, plus der Stichprobenlauf über zufällige Translationen
("fast alle a").

Contracts
---------
def default_scales(cloud, levels=(2, 8)) -> list[float]
def box_counts(cloud, scales, workers=1) -> list[int]
def box_dimension(cloud, scales=None, workers=1) -> BoxCountResult
def full_dimension_trials(ifs, trials=3, radius=1.0, seed=0, ...) -> FullDimensionResult

Args
----
scales : absteigende Kantenlängen delta (mindestens 3)

Returns
-------
BoxCountResult : estimate (Steigung log N gegen log 1/delta), counts,
                 residual (RMS der Regression), intercept
FullDimensionResult : pro Translation target/estimate/ok; passed, wenn
                      mindestens ceil(2 * trials / 3) Versuche innerhalb der
                      Toleranz liegen

Raises
------
DegenerateCloudError
    Alle Punkte identisch (oder weniger als zwei Punkte).
DomainError
    Weniger als drei oder nicht absteigende Skalen.

Side Effects
------------
Logging; fehlgeschlagene Versuche als WARNING.

Notes
-----
- Gitter am unteren Eckpunkt der Bounding-Box verankert, ohne Verschiebungs-
  mittelung; die Anzahl Zellen pro Achse ist ceil(extent / delta).
- Die Generizität einer konkreten Translation wird nicht zertifiziert.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.stats import linregress

from blocks.components.affine.chaos_game import PointCloud, attractor_points
from blocks.components.affine.ifs_model import AffineIFS, sample_translations
from blocks.components.cylinder.cylinder_function import NaturalCylinderFunction
from blocks.components.equilibrium.measures import mu_cesaro
from blocks.components.pressure.dimension import affinity_dimension
from blocks.components.symbolic.words import DEFAULT_BUDGET
from blocks.components.util.errors import BudgetExceededError, DegenerateCloudError, DomainError
from blocks.components.util.parallel import ordered_map

logger = logging.getLogger(__name__)

DEFAULT_LEVELS = (2, 8)
DEFAULT_TOLERANCE = 0.2


def _extent(cloud: PointCloud) -> Tuple[np.ndarray, np.ndarray]:
    if len(cloud) < 2:
        raise DegenerateCloudError("degenerate cloud: fewer than two points")
    lo, hi = cloud.bounds()
    span = hi - lo
    if not np.any(span > 0):
        raise DegenerateCloudError("degenerate cloud: all points are equal")
    return lo, span


def default_scales(cloud: PointCloud, levels: Tuple[int, int] = DEFAULT_LEVELS) -> List[float]:
    """extent * 2^-j for j in levels[0]..levels[1]."""
    _, span = _extent(cloud)
    extent = float(span.max())
    return [extent * 2.0 ** (-j) for j in range(int(levels[0]), int(levels[1]) + 1)]


def _count_one(args: Tuple[np.ndarray, np.ndarray, np.ndarray, float]) -> int:
    points, lo, span, delta = args
    n_cells = np.maximum(np.ceil(span / delta).astype(np.int64), 1)
    cells = np.floor((points - lo) / delta).astype(np.int64)
    cells = np.clip(cells, 0, n_cells - 1)
    # Zellindex pro Punkt in eine Zahl packen
    packed = np.zeros(cells.shape[0], dtype=np.int64)
    for axis in range(cells.shape[1]):
        packed = packed * n_cells[axis] + cells[:, axis]
    return int(np.unique(packed).size)


def box_counts(cloud: PointCloud, scales: Sequence[float], workers: int = 1) -> List[int]:
    lo, span = _extent(cloud)
    tasks = [(cloud.points, lo, span, float(s)) for s in scales]
    return ordered_map(_count_one, tasks, workers)


@dataclass
class BoxCountResult:
    estimate: float
    scales: List[float]
    counts: List[int]
    residual: float
    intercept: float

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"delta": self.scales, "count": self.counts})

    def to_dict(self) -> Dict[str, Any]:
        return {"estimate": self.estimate, "residual": self.residual, "scales": len(self.scales)}


def box_dimension(cloud: PointCloud, scales: Optional[Sequence[float]] = None, workers: int = 1) -> BoxCountResult:
    """Least-squares slope of log N(delta) against log(1/delta)."""
    grid = list(default_scales(cloud) if scales is None else scales)
    if len(grid) < 3:
        raise DomainError(f"box counting needs at least 3 scales, got {len(grid)}")
    if any(b >= a for a, b in zip(grid, grid[1:])) or grid[-1] <= 0:
        raise DomainError("scales must be positive and strictly decreasing")
    counts = box_counts(cloud, grid, workers=workers)
    x = np.log(1.0 / np.asarray(grid))
    y = np.log(np.asarray(counts, dtype=float))
    fit = linregress(x, y)
    resid = y - (fit.intercept + fit.slope * x)
    result = BoxCountResult(
        estimate=float(fit.slope),
        scales=[float(s) for s in grid],
        counts=[int(c) for c in counts],
        residual=float(np.sqrt(np.mean(resid ** 2))),
        intercept=float(fit.intercept),
    )
    logger.info("box dimension %.4f (residual %.3g) over %d scales", result.estimate, result.residual, len(grid))
    return result


@dataclass
class TrialOutcome:
    index: int
    translations: List[float]
    target: float
    estimate: float
    ok: bool


@dataclass
class FullDimensionResult:
    target: float
    tolerance: float
    required: int
    outcomes: List[TrialOutcome] = field(default_factory=list)

    @property
    def agreeing(self) -> int:
        return sum(1 for o in self.outcomes if o.ok)

    @property
    def passed(self) -> bool:
        return self.agreeing >= self.required

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "trial": [o.index for o in self.outcomes],
                "target": [o.target for o in self.outcomes],
                "estimate": [o.estimate for o in self.outcomes],
                "ok": [o.ok for o in self.outcomes],
            }
        )


def full_dimension_trials(
    ifs: AffineIFS,
    trials: int = 3,
    radius: float = 1.0,
    seed: int = 0,
    count: int = 1_000_000,
    burn_in: int = 100,
    n_max: int = 10,
    depth: int = 4,
    t_tol: float = 1e-10,
    tolerance: float = DEFAULT_TOLERANCE,
    levels: Tuple[int, int] = DEFAULT_LEVELS,
    workers: int = 1,
    budget: int = DEFAULT_BUDGET,
) -> FullDimensionResult:
    """Box-count equilibrium-driven clouds for sampled translations."""
    if trials < 1:
        raise DomainError(f"trials must be >= 1, got {trials}")
    dim = affinity_dimension(ifs, n_max, t_tol, workers=workers, budget=budget)
    if not dim.roots:
        raise BudgetExceededError(1, ifs.n_maps, budget)
    n_top, t_top = dim.roots[-1]
    cf = NaturalCylinderFunction(ifs)
    k = min(int(depth), n_top)
    driver = mu_cesaro(cf, t_top, n_top, k, workers=workers, budget=budget)

    result = FullDimensionResult(
        target=float(dim.prediction),
        tolerance=float(tolerance),
        required=math.ceil(2 * int(trials) / 3),
    )
    samples = sample_translations(ifs.d, trials, radius, seed, n_maps=ifs.n_maps)
    for i, flat in enumerate(samples):
        shifted = ifs.with_translations(flat, name=f"{ifs.name or 'ifs'}#{i}")
        cloud = attractor_points(shifted, driver=driver, count=count, burn_in=burn_in, seed=seed + i, workers=workers)
        try:
            estimate = box_dimension(cloud, default_scales(cloud, levels), workers=workers).estimate
        except DegenerateCloudError as e:
            logger.warning("trial %d: %s", i, e)
            estimate = float("nan")
        ok = bool(abs(estimate - result.target) <= tolerance)
        if not ok:
            logger.warning("trial %d: box estimate %.4f vs target %.4f", i, estimate, result.target)
        result.outcomes.append(TrialOutcome(i, [float(v) for v in flat], result.target, estimate, ok))
    return result

# blocks/components/cylinder/axioms.py
"""
Purpose
-------
Stichprobenbasierter Prüfer der drei Zylinderfunktions-Bedingungen:
  (1) BVP           : Wert unabhängig vom Schwanz (konstanter Fall, K_t = 1)
  (2) Subchain-Regel: psi_i <= psi_{i|j} * psi_{sigma^j i}
  (3) Parameterband : psi^t * s_low^(delta|w|) <= psi^(t+delta) <= psi^t * s_high^(delta|w|)

Contracts
---------
def verify_axioms(cf, t_grid, n_max, samples, seed, workers=1) -> AxiomReport
def grid_delta(t_grid) -> float

Returns
-------
AxiomReport mit vorzeichenbehafteten relativen Schlupfwerten (> 0 = Verletzung).

Side Effects
------------
Keine (reines Rechnen).

Notes
-----
- Stichproben werden in Chunks fester Größe gezogen; Chunk c nutzt den
  Zufallsstrom (seed, c). Das Ergebnis hängt daher nicht von workers ab.
- delta = kleinster positiver Abstand des t-Gitters; bei nur einem Gitterpunkt
  DEFAULT_DELTA.
- Verletzungen sind Daten, keine Fehler. violated() vergleicht mit
  VIOLATION_THRESHOLD (CLI-Exitcode 2).
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np

from blocks.components.cylinder.cylinder_function import CylinderFunction
from blocks.components.util.errors import DomainError
from blocks.components.util.parallel import ordered_map
from blocks.components.util.rng import chunk_bounds, make_rng

logger = logging.getLogger(__name__)

DEFAULT_DELTA = 0.25
CHUNK_SIZE = 128
TAIL_LENGTH = 8
SUBCHAIN_TOL = 1e-12
PARAM_TOL = 1e-10
VIOLATION_THRESHOLD = 1e-9
_STREAM_KEY = 0xA1


@dataclass
class AxiomReport:
    kind: str
    samples: int
    seed: int
    delta: float
    t_grid: List[float] = field(default_factory=list)
    bvp_max_ratio: float = 1.0
    k_t: float = 1.0
    worst_subchain_violation: float = -math.inf
    worst_param_violation: float = -math.inf

    @property
    def bvp_slack(self) -> float:
        return self.bvp_max_ratio - self.k_t

    def flags(self) -> Dict[str, bool]:
        return {
            "bvp_ok": self.bvp_slack <= 0.0,
            "subchain_ok": self.worst_subchain_violation <= SUBCHAIN_TOL,
            "param_ok": self.worst_param_violation <= PARAM_TOL,
        }

    def violated(self, threshold: float = VIOLATION_THRESHOLD) -> bool:
        return max(self.bvp_slack, self.worst_subchain_violation, self.worst_param_violation) > threshold

    def to_dict(self) -> Dict[str, Any]:
        out = asdict(self)
        out["bvp_slack"] = self.bvp_slack
        out.update(self.flags())
        return out


def grid_delta(t_grid: Sequence[float]) -> float:
    grid = np.unique(np.asarray(t_grid, dtype=float))
    if grid.size < 2:
        return DEFAULT_DELTA
    return float(np.diff(grid).min())


def _chunk(args: Tuple[CylinderFunction, Tuple[float, ...], int, float, int, int, int, int]) -> Tuple[float, float, float]:
    cf, grid, n_max, delta, start, stop, seed, index = args
    rng = make_rng(seed, _STREAM_KEY, index)
    m = cf.alphabet.size
    max_len = max(2, int(n_max))
    bvp, sub, par = 1.0, -math.inf, -math.inf
    for _ in range(start, stop):
        length = int(rng.integers(2, max_len + 1))
        w = tuple(int(a) for a in rng.integers(0, m, size=length))
        j = int(rng.integers(1, length))
        t = grid[int(rng.integers(0, len(grid)))]
        h1 = tuple(int(a) for a in rng.integers(0, m, size=TAIL_LENGTH))
        h2 = tuple(int(a) for a in rng.integers(0, m, size=TAIL_LENGTH))

        # (1) Schwanzunabhängigkeit
        lv1 = cf.log_value(t, w, h1)
        lv2 = cf.log_value(t, w, h2)
        bvp = max(bvp, math.exp(abs(lv1 - lv2)))

        # (2) Subchain
        gap = lv1 - cf.log_value(t, w[:j]) - cf.log_value(t, w[j:])
        sub = max(sub, math.expm1(gap))

        # (3) Parameterband
        const = cf.constants(t)
        lv_d = cf.log_value(t + delta, w)
        lower = lv1 + delta * length * math.log(const.s_low)
        upper = lv1 + delta * length * math.log(const.s_high)
        par = max(par, math.expm1(lower - lv_d), math.expm1(lv_d - upper))
    return bvp, sub, par


def verify_axioms(
    cf: CylinderFunction,
    t_grid: Sequence[float],
    n_max: int,
    samples: int,
    seed: int,
    workers: int = 1,
) -> AxiomReport:
    """Sample words and split points, report the worst slack per condition."""
    grid = tuple(float(t) for t in t_grid)
    if not grid:
        raise DomainError("t_grid must not be empty")
    if any(t < 0 or not math.isfinite(t) for t in grid):
        raise DomainError("t_grid values must be finite and >= 0")
    delta = grid_delta(grid)
    report = AxiomReport(
        kind=cf.kind,
        samples=int(samples),
        seed=int(seed),
        delta=delta,
        t_grid=list(grid),
        k_t=max(cf.constants(t).k_t for t in grid),
    )
    tasks = [
        (cf, grid, int(n_max), delta, start, stop, int(seed), index)
        for index, (start, stop) in enumerate(chunk_bounds(int(samples), CHUNK_SIZE))
    ]
    for bvp, sub, par in ordered_map(_chunk, tasks, workers):
        report.bvp_max_ratio = max(report.bvp_max_ratio, bvp)
        report.worst_subchain_violation = max(report.worst_subchain_violation, sub)
        report.worst_param_violation = max(report.worst_param_violation, par)

    if report.violated():
        logger.warning("axiom violation for %s cylinder function: %s", cf.kind, report.flags())
    else:
        logger.info(
            "axioms ok (%d samples): subchain %.3e, param %.3e",
            report.samples, report.worst_subchain_violation, report.worst_param_violation,
        )
    return report

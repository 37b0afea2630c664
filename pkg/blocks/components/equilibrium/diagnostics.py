# blocks/components/equilibrium/diagnostics.py
"""
Purpose
-------
Bündelt die Größen, die der Existenzbeweis kombiniert, für einen Lauf:
Entropie und Energie von mu_n auf Tiefe k, Fekete-Obergrenze des Drucks,
Lücke und Invarianzdefekt.

Contracts
---------
def equilibrium_diagnostics(cf, t, n, k, tail="repeat", ...) -> EquilibriumDiagnostics

Notes
-----
- Konvergenzraten von mu_n bzw. gap werden nicht behauptet; der Bericht
  liefert nur die endlichen Werte.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional

from blocks.components.cylinder.cylinder_function import CylinderFunction
from blocks.components.equilibrium.measures import (
    CylinderMeasure,
    energy_depth,
    entropy_depth,
    invariance_defect,
    jensen_residual,
    mu_cesaro,
    nu_weights,
)
from blocks.components.pressure.partition_sum import pressure_sequence
from blocks.components.symbolic.words import DEFAULT_BUDGET

logger = logging.getLogger(__name__)


@dataclass
class EquilibriumDiagnostics:
    t: float
    n: int
    k: int
    tail: str
    entropy_k: float
    energy_k: float
    pressure_upper: float
    gap: float
    invariance_defect_max: float
    defect_bound: float
    jensen_residual_nu: float

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def equilibrium_diagnostics(
    cf: CylinderFunction,
    t: float,
    n: int,
    k: int,
    tail: str = "repeat",
    workers: int = 1,
    budget: int = DEFAULT_BUDGET,
    cache: Optional[Any] = None,
    measure: Optional[CylinderMeasure] = None,
) -> EquilibriumDiagnostics:
    m = measure if measure is not None else mu_cesaro(cf, t, n, k, tail=tail, workers=workers, budget=budget)
    h = entropy_depth(m)
    e = energy_depth(cf, t, m, workers=workers, budget=budget)
    upper = pressure_sequence(cf, t, n, workers=workers, budget=budget, cache=cache).fekete_upper
    defect = invariance_defect(cf, t, n, k, workers=workers, budget=budget) if k <= n - 1 else math.nan
    nu = nu_weights(cf, t, n, workers=workers, budget=budget)
    diag = EquilibriumDiagnostics(
        t=float(t),
        n=int(n),
        k=int(k),
        tail=tail,
        entropy_k=h,
        energy_k=e,
        pressure_upper=upper,
        gap=upper - h - e,
        invariance_defect_max=defect,
        defect_bound=1.0 / n,
        jensen_residual_nu=jensen_residual(cf, t, n, nu, workers=workers, budget=budget),
    )
    logger.info("diagnostics t=%g n=%d k=%d: gap %.6g, defect %.3g", t, n, k, diag.gap, defect)
    return diag

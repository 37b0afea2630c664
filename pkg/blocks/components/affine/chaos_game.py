# blocks/components/affine/chaos_game.py
"""
Purpose
-------
Chaos-Spiel x_{m+1} = phi_{i_m}(x_m) als Realisierung der Projektion
pi: I^inf -> E. Symbole i.i.d. (uniform oder Gewichtsvektor) oder über die
bedingten Massen eines CylinderMeasure der Tiefe k gesteuert.

Contracts
---------
class PointCloud(points, seed, driver, name="")
def attractor_points(ifs, driver=None, count=..., burn_in=..., seed=0, chains=..., workers=1) -> PointCloud
def conditional_table(measure) -> numpy.ndarray

Args
----
driver : None | Sequence[float] | CylinderMeasure
    None = uniform; Vektor = i.i.d. Gewichte; Maß = Markov-Treiber über
    die k-1 zuletzt gewählten Symbole.
chains : Anzahl unabhängiger Ketten; jede Gruppe von CHAIN_GROUP Ketten
    hat ihren eigenen Zufallsstrom (seed, Gruppe).

Returns
-------
PointCloud : (count, d) Punkte, kettenweise hintereinander

Side Effects
------------
Keine.

Notes
-----
- Startpunkt ist der Ursprung; die Kugel um 0 mit Radius
  AffineIFS.bounding_radius() wird von jeder Abbildung in sich abgebildet,
  daher bleiben alle Punkte darin.
- Das neueste Symbol steht vorn in der Adresse: nach i_1..i_m liegt x nahe
  pi(i_m i_{m-1} ...). Der Maß-Treiber wählt a mit
  P(a | u) = m([a u]) / sum_b m([b u]).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from blocks.components.affine.ifs_model import AffineIFS
from blocks.components.equilibrium.measures import CylinderMeasure
from blocks.components.util.errors import DomainError
from blocks.components.util.parallel import ordered_map
from blocks.components.util.rng import make_rng

logger = logging.getLogger(__name__)

DEFAULT_CHAINS = 1024
CHAIN_GROUP = 256
_STREAM_KEY = 0xC6

Driver = Union[None, Sequence[float], CylinderMeasure]


@dataclass
class PointCloud:
    points: np.ndarray
    seed: int
    driver: str
    name: str = ""

    def __len__(self) -> int:
        return int(self.points.shape[0])

    @property
    def d(self) -> int:
        return int(self.points.shape[1])

    def bounds(self) -> Tuple[np.ndarray, np.ndarray]:
        if len(self) == 0:
            return np.zeros(self.d), np.zeros(self.d)
        return self.points.min(axis=0), self.points.max(axis=0)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.points, columns=[f"x{i}" for i in range(self.d)])


def conditional_table(measure: CylinderMeasure) -> np.ndarray:
    """(I^(k-1), I) table of P(a | u); rows without mass fall back to uniform."""
    size = measure.alphabet.size
    joint = measure.masses.reshape(size, -1).T  # [u, a] = m([a u])
    totals = joint.sum(axis=1, keepdims=True)
    with np.errstate(invalid="ignore", divide="ignore"):
        cond = np.where(totals > 0, joint / totals, 1.0 / size)
    return cond


def _pick(cdf: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Row-wise inverse CDF: first a with u < cdf[a]."""
    return np.minimum((u[:, None] >= cdf).sum(axis=1), cdf.shape[1] - 1)


def _run_group(args: Tuple[np.ndarray, np.ndarray, Optional[np.ndarray], int, int, int, int, int, int]) -> np.ndarray:
    matrices, translations, cdf, depth, n_chains, steps, burn_in, seed, group = args
    rng = make_rng(seed, _STREAM_KEY, group)
    m, d = matrices.shape[0], matrices.shape[1]
    x = np.zeros((n_chains, d))
    hist = np.zeros(n_chains, dtype=np.int64)
    out = np.empty((steps, n_chains, d))
    hist_mod = m ** max(depth - 2, 0)
    for step in range(burn_in + steps):
        u = rng.random(n_chains)
        if cdf is None:
            sym = np.minimum((u * m).astype(np.int64), m - 1)
        elif cdf.ndim == 1:
            sym = _pick(np.broadcast_to(cdf, (n_chains, m)), u)
        else:
            sym = _pick(cdf[hist], u)
            if depth >= 2:
                hist = sym * hist_mod + hist // m
        x = np.einsum("cij,cj->ci", matrices[sym], x) + translations[sym]
        if step >= burn_in:
            out[step - burn_in] = x
    return out.transpose(1, 0, 2).reshape(-1, d)


def _driver_cdf(ifs: AffineIFS, driver: Driver) -> Tuple[Optional[np.ndarray], int, str]:
    if driver is None:
        return None, 0, "uniform"
    if isinstance(driver, CylinderMeasure):
        if driver.alphabet.size != ifs.n_maps:
            raise DomainError("driver measure alphabet does not match the IFS")
        if driver.depth < 1:
            raise DomainError("driver measure needs depth >= 1")
        if driver.depth == 1:
            return np.cumsum(driver.masses), 1, f"measure:{driver.provenance}:k=1"
        return np.cumsum(conditional_table(driver), axis=1), driver.depth, f"measure:{driver.provenance}:k={driver.depth}"
    w = np.asarray(driver, dtype=float).reshape(-1)
    if w.size != ifs.n_maps or np.any(w < 0) or not w.sum() > 0:
        raise DomainError(f"driver weights must be {ifs.n_maps} nonnegative values with positive sum")
    return np.cumsum(w / w.sum()), 1, "weights"


def attractor_points(
    ifs: AffineIFS,
    driver: Driver = None,
    count: int = 100_000,
    burn_in: int = 100,
    seed: int = 0,
    chains: int = DEFAULT_CHAINS,
    workers: int = 1,
) -> PointCloud:
    if count < 0 or burn_in < 0 or chains < 1:
        raise DomainError("count >= 0, burn_in >= 0 and chains >= 1 required")
    cdf, depth, label = _driver_cdf(ifs, driver)
    if count == 0:
        return PointCloud(np.zeros((0, ifs.d)), int(seed), label, ifs.name)

    n_chains = min(int(chains), int(count))
    steps = -(-int(count) // n_chains)
    tasks = []
    for group, start in enumerate(range(0, n_chains, CHAIN_GROUP)):
        size = min(CHAIN_GROUP, n_chains - start)
        tasks.append((ifs.matrices, ifs.translations, cdf, depth, size, steps, int(burn_in), int(seed), group))
    parts: List[np.ndarray] = ordered_map(_run_group, tasks, workers)
    points = np.concatenate(parts, axis=0)[: int(count)]
    logger.info("chaos game %s: %d points, %d chains, driver %s", ifs.name or "ifs", len(points), n_chains, label)
    return PointCloud(points, int(seed), label, ifs.name)

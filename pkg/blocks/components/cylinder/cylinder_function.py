# blocks/components/cylinder/cylinder_function.py
"""
Purpose
-------
Zylinderfunktionen psi_i^t auf dem Symbolraum mit zertifizierten Konstanten
(K_t, s_low, s_high). Zwei Varianten:
  1) natural  : psi_i^t = alpha^t(A_i) für ein affines IFS (Subchain-Regel)
  2) product  : psi_i^t = prod_k s_{i_k}^t (Ähnlichkeitsfall, Chain-Regel)

Für Summen über ganze Ebenen I^n liefert jede Variante eine t-freie
LevelTable; log psi für beliebiges t ist danach eine reine Vektoroperation.
Die Tabelle entsteht blockweise über Präfixe fester Tiefe min(n, 4) und wird
in lexikographischer Blockreihenfolge zusammengesetzt.

Contracts
---------
class CylinderConstants(k_t, s_low, s_high)
class LevelTable
class CylinderFunction (abstrakt)
class NaturalCylinderFunction(ifs)
class ProductCylinderFunction(weights)
def cf_value(cf, t, w, tail=None) -> float
def cf_constants(cf, t) -> CylinderConstants
def product_from_ifs(ifs) -> ProductCylinderFunction
def block_prefix_depth(n) -> int

Args
----
t : float >= 0
w : Wort mit |w| >= 1
tail : optionaler Schwanz h; beide Varianten sind konstant und ignorieren ihn

Raises
------
DomainError
    Ungültiges Symbol, leeres Wort, t < 0, Gewichte außerhalb (0, 1).
BudgetExceededError
    level_table für #I^n über dem Budget.

Side Effects
------------
Instanzen merken sich berechnete LevelTables (nur im aktuellen Prozess).

Notes
-----
- Nur konstante Zylinderfunktionen (K_t = 1). Der tail-Parameter ist als
  Erweiterungspunkt für schwanzabhängige Potentiale mit K_t > 1 vorhanden.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from blocks.components.affine.ifs_model import AffineIFS
from blocks.components.linalg.singular_values import (
    ProductStack,
    batched_log_singular_values,
    product_tree,
    svf_log_alpha_t,
)
from blocks.components.symbolic.words import DEFAULT_BUDGET, Alphabet, check_budget
from blocks.components.util.errors import DomainError
from blocks.components.util.parallel import ordered_map

logger = logging.getLogger(__name__)

MAX_PREFIX_DEPTH = 4
TABLE_CACHE_ROWS = 1 << 22


@dataclass(frozen=True)
class CylinderConstants:
    k_t: float
    s_low: float
    s_high: float

    def as_tuple(self) -> Tuple[float, float, float]:
        return (self.k_t, self.s_low, self.s_high)


def block_prefix_depth(n: int) -> int:
    return min(int(n), MAX_PREFIX_DEPTH)


def _check_t(t: float) -> float:
    t = float(t)
    if not math.isfinite(t) or t < 0:
        raise DomainError(f"t must be finite and >= 0, got {t}")
    return t


class LevelTable(ABC):
    """All words of one level, lexicographic, split into prefix blocks."""

    def __init__(self, alphabet: Alphabet, n: int) -> None:
        self.alphabet = alphabet
        self.n = int(n)
        self.prefix_depth = block_prefix_depth(n)
        self.block_rows = alphabet.count(self.n - self.prefix_depth)
        self.n_blocks = alphabet.count(self.prefix_depth)

    def __len__(self) -> int:
        return self.alphabet.count(self.n)

    def block_slices(self) -> List[slice]:
        return [slice(b * self.block_rows, (b + 1) * self.block_rows) for b in range(self.n_blocks)]

    @abstractmethod
    def log_values(self, t: float) -> np.ndarray:
        """log psi_w^t for every word w of the level, packed-index order."""


class NaturalLevelTable(LevelTable):
    def __init__(self, alphabet: Alphabet, n: int, log_sv: np.ndarray) -> None:
        super().__init__(alphabet, n)
        self.log_sv = log_sv

    def log_values(self, t: float) -> np.ndarray:
        return np.asarray(svf_log_alpha_t(self.log_sv, _check_t(t)), dtype=float).reshape(-1)


class ProductLevelTable(LevelTable):
    def __init__(self, alphabet: Alphabet, n: int, log_weight_sum: np.ndarray) -> None:
        super().__init__(alphabet, n)
        self.log_weight_sum = log_weight_sum

    def log_values(self, t: float) -> np.ndarray:
        return _check_t(t) * self.log_weight_sum


# --- Blockfunktionen (modulweit, damit picklebar) -----------------------------
def _natural_block(args: Tuple[np.ndarray, np.ndarray, Tuple[int, ...], int]) -> np.ndarray:
    matrices, log_dets, prefix, depth = args
    stack: Optional[ProductStack] = None
    for a in prefix:
        stack = product_tree(matrices[[a]], log_dets[[a]], 1, stack)
    stack = product_tree(matrices, log_dets, depth, stack)
    return batched_log_singular_values(stack)


def _product_block(args: Tuple[np.ndarray, Tuple[int, ...], int]) -> np.ndarray:
    log_w, prefix, depth = args
    acc = np.array([float(np.sum(log_w[list(prefix)])) if prefix else 0.0])
    for _ in range(int(depth)):
        acc = (acc[:, None] + log_w[None, :]).reshape(-1)
    return acc


def _prefixes(alphabet: Alphabet, p: int) -> List[Tuple[int, ...]]:
    out: List[Tuple[int, ...]] = []
    for b in range(alphabet.count(p)):
        digits = []
        for _ in range(p):
            b, a = divmod(b, alphabet.size)
            digits.append(a)
        out.append(tuple(reversed(digits)))
    return out


class CylinderFunction(ABC):
    kind: str = "abstract"

    def __init__(self, alphabet: Alphabet) -> None:
        self.alphabet = alphabet
        self._tables: Dict[int, LevelTable] = {}

    def __getstate__(self) -> Dict[str, Any]:
        # Tabellen nicht an Worker-Prozesse schicken
        state = dict(self.__dict__)
        state["_tables"] = {}
        return state

    def _word(self, w: Sequence[int]) -> Tuple[int, ...]:
        word = self.alphabet.validate(w)
        if len(word) < 1:
            raise DomainError("cylinder functions are defined on words of length >= 1")
        return word

    @abstractmethod
    def log_value(self, t: float, w: Sequence[int], tail: Optional[Sequence[int]] = None) -> float:
        ...

    def value(self, t: float, w: Sequence[int], tail: Optional[Sequence[int]] = None) -> float:
        return math.exp(self.log_value(t, w, tail))

    @abstractmethod
    def constants(self, t: float) -> CylinderConstants:
        ...

    @abstractmethod
    def content_hash(self) -> str:
        ...

    @abstractmethod
    def _build_blocks(self, n: int, workers: int) -> List[np.ndarray]:
        ...

    @abstractmethod
    def _make_table(self, n: int, data: np.ndarray) -> LevelTable:
        ...

    def level_table(self, n: int, workers: int = 1, budget: int = DEFAULT_BUDGET) -> LevelTable:
        """t-free table of level n (memoized per instance)."""
        if n < 1:
            raise DomainError(f"level must be >= 1, got {n}")
        rows = check_budget(self.alphabet, n, budget)
        cached = self._tables.get(int(n))
        if cached is not None:
            return cached
        blocks = self._build_blocks(int(n), workers)
        table = self._make_table(int(n), np.concatenate(blocks, axis=0))
        logger.debug("%s: level %d table with %d rows in %d blocks", self.kind, n, rows, len(blocks))
        if rows <= TABLE_CACHE_ROWS:
            self._tables[int(n)] = table
        return table


class NaturalCylinderFunction(CylinderFunction):
    """psi_i^t = alpha^t(A_i) for the linear parts of an affine IFS."""

    kind = "natural"

    def __init__(self, ifs: AffineIFS) -> None:
        super().__init__(ifs.alphabet)
        self.ifs = ifs
        self._log_dets = ifs.log_dets()

    def log_value(self, t: float, w: Sequence[int], tail: Optional[Sequence[int]] = None) -> float:
        word = self._word(w)
        stack = None
        for a in word:
            stack = product_tree(self.ifs.matrices[[a]], self._log_dets[[a]], 1, stack)
        log_sv = batched_log_singular_values(stack)[0]
        return float(svf_log_alpha_t(log_sv, _check_t(t)))

    def constants(self, t: float) -> CylinderConstants:
        spectra = self.ifs.spectra()
        return CylinderConstants(
            k_t=1.0,
            s_low=min(s.bottom for s in spectra),
            s_high=max(s.top for s in spectra),
        )

    def content_hash(self) -> str:
        return "nat-" + self.ifs.content_hash()

    def _build_blocks(self, n: int, workers: int) -> List[np.ndarray]:
        p = block_prefix_depth(n)
        tasks = [(self.ifs.matrices, self._log_dets, prefix, n - p) for prefix in _prefixes(self.alphabet, p)]
        return ordered_map(_natural_block, tasks, workers)

    def _make_table(self, n: int, data: np.ndarray) -> LevelTable:
        return NaturalLevelTable(self.alphabet, n, data)


class ProductCylinderFunction(CylinderFunction):
    """psi_i^t = prod_k s_{i_k}^t with similarity ratios s_i in (0, 1)."""

    kind = "product"

    def __init__(self, weights: Sequence[float]) -> None:
        w = np.asarray(weights, dtype=float).reshape(-1)
        if w.size < 1 or np.any(~np.isfinite(w)) or np.any(w <= 0) or np.any(w >= 1):
            raise DomainError(f"product weights must lie in (0, 1), got {w.tolist()}")
        super().__init__(Alphabet(int(w.size), strict=w.size >= 2))
        self.weights = w
        self._log_w = np.log(w)

    def log_value(self, t: float, w: Sequence[int], tail: Optional[Sequence[int]] = None) -> float:
        word = self._word(w)
        return _check_t(t) * float(np.sum(self._log_w[list(word)]))

    def constants(self, t: float) -> CylinderConstants:
        return CylinderConstants(k_t=1.0, s_low=float(self.weights.min()), s_high=float(self.weights.max()))

    def content_hash(self) -> str:
        payload = json.dumps([float(v).hex() for v in self.weights])
        return "prod-" + hashlib.sha1(payload.encode("utf-8")).hexdigest()[:10]

    def _build_blocks(self, n: int, workers: int) -> List[np.ndarray]:
        p = block_prefix_depth(n)
        tasks = [(self._log_w, prefix, n - p) for prefix in _prefixes(self.alphabet, p)]
        return ordered_map(_product_block, tasks, workers)

    def _make_table(self, n: int, data: np.ndarray) -> LevelTable:
        return ProductLevelTable(self.alphabet, n, data)


def cf_value(cf: CylinderFunction, t: float, w: Sequence[int], tail: Optional[Sequence[int]] = None) -> float:
    return cf.value(t, w, tail)


def cf_constants(cf: CylinderFunction, t: float) -> CylinderConstants:
    return cf.constants(t)


def product_from_ifs(ifs: AffineIFS) -> ProductCylinderFunction:
    """Similarity cylinder function with s_i = alpha_1(A_i)."""
    return ProductCylinderFunction(ifs.contraction_ratios())

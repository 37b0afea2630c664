# blocks/components/equilibrium/measures.py
"""
Purpose
-------
Endliche Konstruktionen aus dem Existenzbeweis der Gleichgewichtsmaße:
nu_n-Gewichte, Cesàro-Mittel mu_n, Entropie/Energie auf Tiefe k,
Jensen-Residuum, Invarianzdefekt, lokale Dimension (Monte Carlo) und eine
Bernoulli-Schätzung des Variationsprinzips.

Contracts
---------
class CylinderMeasure(alphabet, depth, masses, provenance)
def nu_weights(cf, t, n, ...) -> CylinderMeasure
def mu_cesaro(cf, t, n, k, tail="repeat", ...) -> CylinderMeasure
def block_entropy(m) -> float
def entropy_depth(m) -> float
def energy_depth(cf, t, m, ...) -> float
def jensen_residual(cf, t, n, m, ...) -> float
def invariance_defect(cf, t, n, k, ...) -> float
def shifted_marginal(m, shift, depth) -> CylinderMeasure
def entropy_subadditivity_slack(m, a) -> float
def local_dimension_samples(cf, t, n, count, seed, ...) -> LocalDimensionSample
def bernoulli_lower_estimate(cf, t, k, iterations, ...) -> BernoulliEstimate
def measure_to_frame(m) -> pandas.DataFrame[word, mass]

Args
----
tail : "repeat"  Fenster j > n-k werden mit dem Schwanzsymbol 0 aufgefüllt
       "drop"    diese Fenster entfallen, Rest wird renormiert

Raises
------
DomainError
    k außerhalb [1, n], Tabellenlänge falsch, negative Massen, Summe != 1.
BudgetExceededError
    #I^n über dem Budget.

Side Effects
------------
Keine.

Notes
-----
- Alle Logarithmen natürlich (nats); H(0) = 0 über scipy.special.entr.
- Massen werden im Log-Raum normiert: m_w = exp(log psi_w - log S_n).
- Mit tail="repeat" sind die Tiefen von mu_n marginal-konsistent.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
from scipy.special import entr, logsumexp

from blocks.components.cylinder.cylinder_function import CylinderFunction
from blocks.components.pressure.partition_sum import table_log_sum
from blocks.components.symbolic.words import DEFAULT_BUDGET, Alphabet, check_budget, pack_word, word_digits
from blocks.components.util.errors import DomainError
from blocks.components.util.rng import make_rng

logger = logging.getLogger(__name__)

MASS_TOL = 1e-9
TAIL_MODES = ("repeat", "drop")
_STREAM_KEY = 0x1D


@dataclass(frozen=True, eq=False)
class CylinderMeasure:
    """Masses of all level-k cylinders, addressed by packed word index."""

    alphabet: Alphabet
    depth: int
    masses: np.ndarray
    provenance: str = "custom"

    def __post_init__(self) -> None:
        m = np.asarray(self.masses, dtype=float).reshape(-1)
        if m.size != self.alphabet.count(self.depth):
            raise DomainError(f"depth {self.depth} needs {self.alphabet.count(self.depth)} masses, got {m.size}")
        if np.any(m < 0) or not np.all(np.isfinite(m)):
            raise DomainError("masses must be finite and nonnegative")
        if abs(float(m.sum()) - 1.0) > MASS_TOL:
            raise DomainError(f"masses must sum to 1, got {float(m.sum())!r}")
        m.setflags(write=False)
        object.__setattr__(self, "masses", m)

    @classmethod
    def from_weights(cls, alphabet: Alphabet, depth: int, weights: Any, provenance: str = "custom") -> "CylinderMeasure":
        w = np.asarray(weights, dtype=float).reshape(-1)
        total = float(w.sum())
        if not total > 0:
            raise DomainError("weights must have positive total")
        return cls(alphabet, int(depth), w / total, provenance)

    @classmethod
    def uniform(cls, alphabet: Alphabet, depth: int) -> "CylinderMeasure":
        count = alphabet.count(depth)
        return cls(alphabet, int(depth), np.full(count, 1.0 / count), "uniform")

    @classmethod
    def point_mass(cls, alphabet: Alphabet, word: Sequence[int]) -> "CylinderMeasure":
        m = np.zeros(alphabet.count(len(word)))
        m[pack_word(alphabet, word)] = 1.0
        return cls(alphabet, len(word), m, "point")

    @classmethod
    def bernoulli(cls, p: Sequence[float], depth: int) -> "CylinderMeasure":
        """Product measure with symbol probabilities p, restricted to depth k."""
        probs = np.asarray(p, dtype=float)
        alphabet = Alphabet(int(probs.size), strict=probs.size >= 2)
        m = np.ones(1)
        for _ in range(int(depth)):
            m = (m[:, None] * probs[None, :]).reshape(-1)
        return cls.from_weights(alphabet, depth, m, "bernoulli")

    def marginal(self, k: int) -> "CylinderMeasure":
        """Restriction to level k <= depth (sum over the trailing symbols)."""
        if not 0 <= k <= self.depth:
            raise DomainError(f"cannot restrict depth {self.depth} to {k}")
        masses = self.masses.reshape(self.alphabet.count(k), -1).sum(axis=1)
        return CylinderMeasure(self.alphabet, int(k), masses, self.provenance)

    def mass(self, word: Sequence[int]) -> float:
        if len(word) > self.depth:
            raise DomainError(f"word of length {len(word)} deeper than the table ({self.depth})")
        return float(self.marginal(len(word)).masses[pack_word(self.alphabet, word)])


def _check_tail(tail: str) -> str:
    if tail not in TAIL_MODES:
        raise DomainError(f"tail mode must be one of {TAIL_MODES}, got {tail!r}")
    return tail


def _log_weights(cf: CylinderFunction, t: float, n: int, workers: int, budget: int):
    table = cf.level_table(n, workers=workers, budget=budget)
    lv = table.log_values(t)
    return lv, table_log_sum(table, t)


def nu_weights(
    cf: CylinderFunction, t: float, n: int, workers: int = 1, budget: int = DEFAULT_BUDGET
) -> CylinderMeasure:
    """nu_n([i]) = psi_i^t / S_n(t) on level n."""
    lv, lse = _log_weights(cf, t, n, workers, budget)
    return CylinderMeasure(cf.alphabet, int(n), np.exp(lv - lse), "nu")


def _window_cells(idx: np.ndarray, size: int, n: int, k: int, j: int) -> np.ndarray:
    """Depth-k cylinder hit by window j of every level-n word (tail padded with 0)."""
    if j <= n - k:
        return (idx // size ** (n - j - k)) % size ** k
    r = n - j
    return (idx % size ** r) * size ** (k - r)


def mu_cesaro(
    cf: CylinderFunction,
    t: float,
    n: int,
    k: int,
    tail: str = "repeat",
    workers: int = 1,
    budget: int = DEFAULT_BUDGET,
) -> CylinderMeasure:
    """mu_n = (1/n) sum_j nu_n o sigma^-j, read off at depth k."""
    if not 1 <= k <= n:
        raise DomainError(f"need 1 <= k <= n, got k={k}, n={n}")
    _check_tail(tail)
    nu = nu_weights(cf, t, n, workers=workers, budget=budget)
    size = cf.alphabet.size
    idx = np.arange(cf.alphabet.count(n), dtype=np.int64)
    cells = size ** k
    last = n - 1 if tail == "repeat" else n - k
    acc = np.zeros(cells)
    for j in range(0, last + 1):
        acc += np.bincount(_window_cells(idx, size, n, k, j), weights=nu.masses, minlength=cells)
    return CylinderMeasure(cf.alphabet, int(k), acc / (last + 1), "mu_cesaro")


def block_entropy(m: CylinderMeasure) -> float:
    """H_k = -sum m log m over the level-k cylinders."""
    return float(np.sum(entr(m.masses)))


def entropy_depth(m: CylinderMeasure) -> float:
    if m.depth < 1:
        return 0.0
    return block_entropy(m) / m.depth


def energy_depth(
    cf: CylinderFunction, t: float, m: CylinderMeasure, workers: int = 1, budget: int = DEFAULT_BUDGET
) -> float:
    """(1/k) sum_i m([i]) log psi_i^t."""
    if m.depth < 1:
        raise DomainError("energy needs a measure of depth >= 1")
    lv = cf.level_table(m.depth, workers=workers, budget=budget).log_values(t)
    return float(np.dot(m.masses, lv)) / m.depth


def jensen_residual(
    cf: CylinderFunction,
    t: float,
    n: int,
    m: CylinderMeasure,
    workers: int = 1,
    budget: int = DEFAULT_BUDGET,
) -> float:
    """(1/n) log S_n - (entropy + energy) of m at depth n; >= 0 for every m."""
    if m.depth != n:
        raise DomainError(f"measure depth {m.depth} does not match level {n}")
    table = cf.level_table(n, workers=workers, budget=budget)
    lse = table_log_sum(table, t)
    return lse / n - (entropy_depth(m) + energy_depth(cf, t, m, workers=workers, budget=budget))


def shifted_marginal(m: CylinderMeasure, shift: int, depth: int) -> CylinderMeasure:
    """(m o sigma^-shift) at the given depth, from the deeper table of m."""
    if shift < 0 or depth < 0 or shift + depth > m.depth:
        raise DomainError(f"shift {shift} + depth {depth} exceeds table depth {m.depth}")
    size = m.alphabet.size
    cube = m.masses.reshape(size ** shift, size ** depth, size ** (m.depth - shift - depth))
    return CylinderMeasure(m.alphabet, int(depth), cube.sum(axis=(0, 2)), "shifted")


def entropy_subadditivity_slack(m: CylinderMeasure, a: int) -> float:
    """H_{a+b}(m) - H_a(m) - H_b(m o sigma^-a) with b = depth - a; <= 0 for every m."""
    b = m.depth - a
    if a < 0 or b < 0:
        raise DomainError(f"split {a} outside [0, {m.depth}]")
    return block_entropy(m) - block_entropy(m.marginal(a)) - block_entropy(shifted_marginal(m, a, b))


def invariance_defect(
    cf: CylinderFunction,
    t: float,
    n: int,
    k: int,
    workers: int = 1,
    budget: int = DEFAULT_BUDGET,
) -> float:
    """max_i |mu_n([i]) - mu_n(sigma^-1[i])| over level-k words."""
    if not 1 <= k <= n - 1:
        raise DomainError(f"need 1 <= k <= n-1, got k={k}, n={n}")
    m_k = mu_cesaro(cf, t, n, k, workers=workers, budget=budget)
    m_k1 = mu_cesaro(cf, t, n, k + 1, workers=workers, budget=budget)
    preimage = m_k1.masses.reshape(cf.alphabet.size, -1).sum(axis=0)
    return float(np.max(np.abs(m_k.masses - preimage)))


@dataclass
class LocalDimensionSample:
    t: float
    n: int
    ratios: np.ndarray
    words: np.ndarray

    @property
    def mean(self) -> float:
        return float(np.mean(self.ratios)) if self.ratios.size else float("nan")

    @property
    def std(self) -> float:
        return float(np.std(self.ratios)) if self.ratios.size else float("nan")

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"index": self.words, "ratio": self.ratios})


def local_dimension_samples(
    cf: CylinderFunction,
    t: float,
    n: int,
    count: int,
    seed: int,
    workers: int = 1,
    budget: int = DEFAULT_BUDGET,
) -> LocalDimensionSample:
    """log nu_n([w]) / log psi_w^t for words w drawn from nu_n."""
    lv, lse = _log_weights(cf, t, n, workers, budget)
    size = cf.alphabet.size
    # Präfix-Logsummen, sums[p] hat Länge size**p
    sums: List[np.ndarray] = [None] * (n + 1)  # type: ignore[list-item]
    sums[n] = lv
    for p in range(n - 1, -1, -1):
        sums[p] = logsumexp(sums[p + 1].reshape(-1, size), axis=1)

    rng = make_rng(seed, _STREAM_KEY)
    idx = np.zeros(int(count), dtype=np.int64)
    for p in range(1, n + 1):
        children = idx[:, None] * size + np.arange(size)[None, :]
        logp = sums[p][children] - sums[p - 1][idx][:, None]
        cdf = np.cumsum(np.exp(logp), axis=1)
        u = rng.random(int(count))[:, None] * cdf[:, -1:]
        choice = np.minimum((u >= cdf).sum(axis=1), size - 1)
        idx = idx * size + choice

    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = (lv[idx] - lse) / lv[idx]
    return LocalDimensionSample(t=float(t), n=int(n), ratios=ratios, words=idx)


@dataclass
class BernoulliEstimate:
    p: np.ndarray
    score: float
    iterations: int
    label: str = "estimate"
    history: List[float] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {f"p_{a}": float(v) for a, v in enumerate(self.p)}
        out.update({"score": self.score, "iterations": self.iterations, "label": self.label})
        return out


def bernoulli_lower_estimate(
    cf: CylinderFunction,
    t: float,
    k: int,
    iterations: int,
    step: float = 1.0,
    workers: int = 1,
    budget: int = DEFAULT_BUDGET,
) -> BernoulliEstimate:
    """Maximize h(p) + E_k(p) over Bernoulli measures, softmax ascent from uniform."""
    if k < 1:
        raise DomainError(f"depth must be >= 1, got {k}")
    check_budget(cf.alphabet, k, budget)
    size = cf.alphabet.size
    lv = cf.level_table(k, workers=workers, budget=budget).log_values(t)
    digits = word_digits(cf.alphabet, k, budget)
    counts = np.stack([(digits == a).sum(axis=1) for a in range(size)], axis=1).astype(float)

    def evaluate(theta: np.ndarray):
        log_p = theta - logsumexp(theta)
        p = np.exp(log_p)
        m = np.exp(counts @ log_p)
        score = float(np.sum(entr(p)) + np.dot(m, lv) / k)
        grad_e = (counts * (m * lv)[:, None]).sum(axis=0) / (k * p)
        return p, log_p, score, grad_e

    theta = np.zeros(size)
    p, log_p, score, grad_e = evaluate(theta)
    history = [score]
    eta = float(step)
    done = 0
    for done in range(1, int(iterations) + 1):
        direction = grad_e - log_p
        direction -= direction.mean()
        if not np.any(np.abs(direction) > 1e-12):
            break
        while eta > 1e-12:
            cand = theta + eta * direction
            p_c, log_p_c, score_c, grad_c = evaluate(cand)
            if score_c >= score:
                break
            eta *= 0.5
        else:
            break
        improvement = score_c - score
        theta, p, log_p, score, grad_e = cand, p_c, log_p_c, score_c, grad_c
        history.append(score)
        eta = min(float(step), 2.0 * eta)
        if improvement <= 1e-15:
            break
    logger.info("bernoulli estimate at t=%g, k=%d: score %.12g after %d iterations", t, k, score, done)
    return BernoulliEstimate(p=p, score=score, iterations=done, history=history)


def _word_label(alphabet: Alphabet, digits: np.ndarray) -> List[str]:
    sep = "" if alphabet.size <= 10 else "."
    return [sep.join(str(int(a)) for a in row) for row in digits]


def measure_to_frame(m: CylinderMeasure) -> pd.DataFrame:
    """Rows word, mass in lexicographic order."""
    digits = word_digits(m.alphabet, m.depth, budget=max(DEFAULT_BUDGET, m.masses.size))
    return pd.DataFrame({"word": _word_label(m.alphabet, digits), "mass": m.masses})

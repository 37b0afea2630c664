# blocks/components/symbolic/words.py
"""
Purpose
-------
Wörter über einem endlichen Alphabet I, Zylinder-Adressierung, Shift und
Symbolmetrik. Grundlage aller anderen Komponenten.

Ein Wort ist ein Tupel von Symbolindizes in [0, #I). Zusätzlich hat jedes
Wort der Länge n einen gepackten Index (Basis #I); lexikographische Ordnung
entspricht der numerischen Ordnung des gepackten Index. Unendliche Symbole
werden nur als endliches Präfix plus fester Schwanz (Symbol 0 wiederholt)
dargestellt; der Schwanz wird von den implementierten Zylinderfunktionen
ignoriert.

Contracts
---------
class Alphabet(size: int)
def words_of_length(alphabet, n, budget=DEFAULT_BUDGET) -> Iterator[Word]
def shift_word(w, j=1) -> Word
def concat(i, j) -> Word
def restrict(w, k) -> Word
def word_metric(i, j) -> float
def pack_word(alphabet, w) -> int
def unpack_word(alphabet, index, n) -> Word
def word_digits(alphabet, n, budget=DEFAULT_BUDGET) -> numpy.ndarray
def check_budget(alphabet, n, budget=DEFAULT_BUDGET) -> int

Raises
------
DomainError
    Leeres Wort beim Shift, ungleiche Längen in der Metrik, ungültiges Symbol.
BudgetExceededError
    Wenn #I^n das Aufzählungsbudget übersteigt.

Side Effects
------------
Keine.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Sequence, Tuple

import numpy as np

from blocks.components.util.errors import BudgetExceededError, DomainError

Word = Tuple[int, ...]

DEFAULT_BUDGET = 1 << 24
TAIL_SYMBOL = 0


@dataclass(frozen=True)
class Alphabet:
    size: int
    # strict=False nur für degenerierte Testsysteme mit einem Symbol
    strict: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self) -> None:
        if int(self.size) < (2 if self.strict else 1):
            raise DomainError(f"alphabet needs at least two symbols, got {self.size}")

    def validate(self, w: Sequence[int]) -> Word:
        """Return w as a tuple, checking every entry is a valid symbol."""
        out = tuple(int(a) for a in w)
        for a in out:
            if not 0 <= a < self.size:
                raise DomainError(f"invalid symbol {a} for alphabet of size {self.size}")
        return out

    def count(self, n: int) -> int:
        return int(self.size) ** int(n)


def check_budget(alphabet: Alphabet, n: int, budget: int = DEFAULT_BUDGET) -> int:
    """Return #I^n or raise BudgetExceededError."""
    if n < 0:
        raise DomainError(f"level must be >= 0, got {n}")
    count = alphabet.count(n)
    if count > int(budget):
        raise BudgetExceededError(n, count, budget)
    return count


def words_of_length(alphabet: Alphabet, n: int, budget: int = DEFAULT_BUDGET) -> Iterator[Word]:
    """Stream I^n in strict lexicographic order."""
    check_budget(alphabet, n, budget)
    # itertools.product ist bereits lexikographisch und lazy
    return itertools.product(range(alphabet.size), repeat=int(n))


def shift_word(w: Sequence[int], j: int = 1) -> Word:
    """sigma^j on a finite word."""
    if j < 0:
        raise DomainError("shift count must be >= 0")
    if j > 0 and len(w) < j:
        raise DomainError(f"cannot shift a word of length {len(w)} by {j}")
    return tuple(w[j:])


def concat(i: Sequence[int], j: Sequence[int]) -> Word:
    return tuple(i) + tuple(j)


def restrict(w: Sequence[int], k: int) -> Word:
    """i|_k, the first k symbols."""
    if not 0 <= k <= len(w):
        raise DomainError(f"cannot restrict a word of length {len(w)} to {k}")
    return tuple(w[:k])


def word_metric(i: Sequence[int], j: Sequence[int]) -> float:
    """2^-(k-1) with k the first (1-based) disagreement; 0 for equal words."""
    if len(i) != len(j):
        raise DomainError(f"metric needs equal lengths, got {len(i)} and {len(j)}")
    for k, (a, b) in enumerate(zip(i, j), start=1):
        if a != b:
            return 2.0 ** (-(k - 1))
    return 0.0


def pack_word(alphabet: Alphabet, w: Sequence[int]) -> int:
    idx = 0
    for a in alphabet.validate(w):
        idx = idx * alphabet.size + a
    return idx


def unpack_word(alphabet: Alphabet, index: int, n: int) -> Word:
    if not 0 <= index < alphabet.count(n):
        raise DomainError(f"index {index} out of range for level {n}")
    digits = []
    for _ in range(int(n)):
        index, a = divmod(index, alphabet.size)
        digits.append(a)
    return tuple(reversed(digits))


def word_digits(alphabet: Alphabet, n: int, budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """Digit table of shape (#I^n, n); row r is the word with packed index r."""
    count = check_budget(alphabet, n, budget)
    idx = np.arange(count, dtype=np.int64)
    powers = alphabet.size ** np.arange(int(n) - 1, -1, -1, dtype=np.int64)
    return (idx[:, None] // powers[None, :]) % alphabet.size

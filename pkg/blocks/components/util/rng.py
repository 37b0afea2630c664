# blocks/components/util/rng.py
"""
Purpose
-------
Reproduzierbare Zufallszahlen. Verwendet wird ausschließlich NumPys
PCG64-Generator; abgeleitete Ströme entstehen über SeedSequence mit festem
spawn_key, d. h. der Strom für Chunk/Kette k hängt nur von (seed, k) ab und
nicht davon, wie viele Worker rechnen.

Contracts
---------
def make_rng(seed: int, *keys: int) -> numpy.random.Generator
def chunk_bounds(total: int, chunk_size: int) -> list[tuple[int, int]]

Side Effects
------------
Keine.
"""

from __future__ import annotations

from typing import List, Tuple

import numpy as np

GENERATOR_NAME = "PCG64"
SEED_MASK = (1 << 64) - 1


def make_rng(seed: int, *keys: int) -> np.random.Generator:
    """PCG64 generator for the substream (seed, keys...)."""
    ss = np.random.SeedSequence(int(seed) & SEED_MASK, spawn_key=tuple(int(k) for k in keys))
    return np.random.Generator(np.random.PCG64(ss))


def chunk_bounds(total: int, chunk_size: int) -> List[Tuple[int, int]]:
    """Half-open [start, stop) ranges covering 0..total in fixed-size chunks."""
    if chunk_size < 1:
        raise ValueError("chunk_size must be >= 1")
    return [(start, min(start + chunk_size, total)) for start in range(0, int(total), int(chunk_size))]

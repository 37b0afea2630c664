# blocks/components/linalg/singular_values.py
"""
Purpose
-------
Kleine dichte Matrizen (d = 1..4), Singulärwerte und die
Singulärwertfunktion alpha^t. Numerischer Kern der natürlichen
Zylinderfunktion.

Contracts
---------
class SingularSpectrum(values: tuple[float, ...])
def as_matrix(A) -> numpy.ndarray
def singular_values(A) -> SingularSpectrum
def operator_norm(A) -> float
def svf_log_alpha_t(log_sv, t) -> numpy.ndarray | float
def svf_alpha_t(A, t) -> float
def word_matrix(ifs, w) -> numpy.ndarray
def product_tree(matrices, log_dets, depth, start=None) -> ProductStack
def batched_log_singular_values(stack: ProductStack) -> numpy.ndarray

Args
----
A : array-like (d, d)
t : float >= 0
log_sv : array (..., d), absteigend sortierte log-Singulärwerte

Returns
-------
siehe Contracts.

Raises
------
NumericallySingularError
    alpha_d < 1e-14 * alpha_1.
DomainError
    Nicht-quadratische, nicht-endliche oder zu große Matrix, t < 0.

Notes
-----
- d <= 2: geschlossene Form über alpha_1 +- alpha_2 =
  sqrt((a +- d)^2 + (c -+ b)^2); exakt im konformen Fall.
- d >= 3: numpy.linalg.svd (batched).
- Der kleinste Wert kommt immer aus |det| / (alpha_1 ... alpha_{d-1}); so
  bleibt das Produkt aller Werte = |det| und alpha_d behält seine relative
  Genauigkeit.
- Wortprodukte werden ebenenweise aus den Präfixprodukten erweitert (jede
  Multiplikation genau einmal) und pro Matrix auf max|a_ij| = 1 normiert;
  der Logarithmus des Skalierungsfaktors läuft mit.
- alpha^0 := 1; für ganzzahliges t = l gilt alpha^t = alpha_1 ... alpha_l.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from typing import Any, Optional, Sequence, Tuple, Union

import numpy as np

from blocks.components.util.errors import DomainError, NumericallySingularError

MAX_DIM = 4
SINGULAR_RATIO = 1e-14


@dataclass(frozen=True)
class SingularSpectrum:
    values: Tuple[float, ...]

    @property
    def top(self) -> float:
        return self.values[0]

    @property
    def bottom(self) -> float:
        return self.values[-1]

    @property
    def d(self) -> int:
        return len(self.values)

    def product(self) -> float:
        return float(np.prod(self.values))


@dataclass
class ProductStack:
    """Normalized matrix products with their log scale and log|det|."""

    normalized: np.ndarray  # (N, d, d), max|entry| == 1
    log_scale: np.ndarray   # (N,)
    log_det: np.ndarray     # (N,)

    def __len__(self) -> int:
        return int(self.normalized.shape[0])


def as_matrix(A: Any) -> np.ndarray:
    """Validate and convert to a float (d, d) array."""
    M = np.asarray(A, dtype=float)
    if M.ndim == 0:
        M = M.reshape(1, 1)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {M.shape}")
    if not 1 <= M.shape[0] <= MAX_DIM:
        raise DomainError(f"dimension {M.shape[0]} not supported (1..{MAX_DIM})")
    if not np.all(np.isfinite(M)):
        raise DomainError("matrix has non-finite entries")
    return M


def _top_two_2x2(N: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    a, b = N[..., 0, 0], N[..., 0, 1]
    c, d = N[..., 1, 0], N[..., 1, 1]
    p = np.hypot(a + d, c - b)  # alpha_1 + alpha_2
    q = np.hypot(a - d, c + b)  # alpha_1 - alpha_2
    return 0.5 * (p + q), 0.5 * (p - q)


def singular_values(A: Any) -> SingularSpectrum:
    """Sorted singular values of a single matrix."""
    M = as_matrix(A)
    d = M.shape[0]
    if d == 1:
        vals = np.array([abs(M[0, 0])])
    elif d == 2:
        top, _ = _top_two_2x2(M)
        det = abs(M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0])
        vals = np.array([float(top), det / float(top) if top > 0 else 0.0])
    else:
        vals = np.linalg.svd(M, compute_uv=False)
        head = float(np.prod(vals[:-1]))
        det = abs(float(np.linalg.det(M)))
        if head > 0:
            vals[-1] = det / head
    if vals[0] <= 0 or vals[-1] < SINGULAR_RATIO * vals[0]:
        raise NumericallySingularError(
            f"numerically singular: alpha_d={vals[-1]:.3e}, alpha_1={vals[0]:.3e}"
        )
    # absteigend; bei Rundung kann alpha_d minimal über alpha_{d-1} landen
    vals = np.sort(vals)[::-1]
    return SingularSpectrum(values=tuple(float(v) for v in vals))


def operator_norm(A: Any) -> float:
    return singular_values(A).top


def svf_log_alpha_t(log_sv: np.ndarray, t: float) -> Union[np.ndarray, float]:
    """log alpha^t from descending log singular values (last axis)."""
    t = float(t)
    if t < 0 or not math.isfinite(t):
        raise DomainError(f"t must be finite and >= 0, got {t}")
    L = np.asarray(log_sv, dtype=float)
    d = L.shape[-1]
    if t == 0.0:
        return np.zeros(L.shape[:-1]) if L.ndim > 1 else 0.0
    if t > d:
        out = (t / d) * L.sum(axis=-1)
    else:
        l = math.ceil(t)  # kleinste ganze Zahl >= t
        out = (t - l + 1) * L[..., l - 1]
        if l >= 2:
            out = L[..., : l - 1].sum(axis=-1) + out
    return out if L.ndim > 1 else float(out)


def svf_alpha_t(A: Any, t: float) -> float:
    spectrum = singular_values(A)
    return math.exp(svf_log_alpha_t(np.log(np.array(spectrum.values)), t))


def word_matrix(ifs: Any, w: Sequence[int]) -> np.ndarray:
    """A_{w_1} ... A_{w_n}, left to right; identity for the empty word."""
    mats = np.asarray(ifs.matrices, dtype=float)
    d = mats.shape[1]
    for a in w:
        if not 0 <= int(a) < mats.shape[0]:
            raise DomainError(f"invalid symbol {a} for an IFS with {mats.shape[0]} maps")
    return reduce(np.matmul, (mats[int(a)] for a in w), np.eye(d))


def product_tree(
    matrices: np.ndarray,
    log_dets: np.ndarray,
    depth: int,
    start: Optional[ProductStack] = None,
) -> ProductStack:
    """Extend every product in `start` by all words of length `depth`."""
    mats = np.asarray(matrices, dtype=float)
    m, d = mats.shape[0], mats.shape[1]
    if start is None:
        start = ProductStack(np.eye(d)[None, :, :], np.zeros(1), np.zeros(1))
    N, log_scale, log_det = start.normalized, start.log_scale, start.log_det
    for _ in range(int(depth)):
        # Rechtsmultiplikation: Index w * m + a entspricht dem Wort (w, a)
        N = np.einsum("wij,ajk->waik", N, mats).reshape(-1, d, d)
        log_scale = np.repeat(log_scale, m)
        log_det = np.repeat(log_det, m) + np.tile(log_dets, len(log_det))
        s = np.abs(N).max(axis=(1, 2))
        N = N / s[:, None, None]
        log_scale = log_scale + np.log(s)
    return ProductStack(N, log_scale, log_det)


def batched_log_singular_values(stack: ProductStack) -> np.ndarray:
    """Descending log singular values (N, d) of all products in the stack."""
    N = stack.normalized
    d = N.shape[-1]
    if d == 1:
        return stack.log_det[:, None].copy()
    if d == 2:
        top, _ = _top_two_2x2(N)
        log_top = np.log(top) + stack.log_scale
        log_bottom = stack.log_det - log_top
        return np.column_stack([np.maximum(log_top, log_bottom), np.minimum(log_top, log_bottom)])
    head = np.log(np.linalg.svd(N, compute_uv=False)[:, :-1]) + stack.log_scale[:, None]
    last = stack.log_det - head.sum(axis=1)
    return np.sort(np.column_stack([head, last]), axis=1)[:, ::-1]

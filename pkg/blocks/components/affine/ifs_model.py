# blocks/components/affine/ifs_model.py
"""
Purpose
-------
Affines IFS phi_i(x) = A_i x + a_i: Datenmodell, Hypothesenprüfung
(nicht-singulär, kontrahierend, |A_i| < 1/2) und Translations-Sampling für
die "fast alle a"-Aussage.

Contracts
---------
class AffineIFS(matrices, translations, name="")
def validate_ifs(ifs) -> IfsValidationReport
def ensure_valid(ifs) -> IfsValidationReport
def sample_translations(d, count, radius, seed, n_maps=2) -> numpy.ndarray

Args
----
matrices : array-like (m, d, d)
translations : array-like (m, d)
radius : float > 0   Halbe Kantenlänge des Würfels [-r, r]^(d*m)

Returns
-------
IfsValidationReport : errors (harte Fehler), warnings (u. a. Norm-1/2-Hypothese)
numpy.ndarray : (count, m*d) Translationsvektoren

Raises
------
IfsValidationError
    ensure_valid bei singulärer/expandierender Abbildung oder < 2 Abbildungen.
DomainError
    Formfehler der Eingaben, radius <= 0.

Side Effects
------------
Keine.

Notes
-----
- Die Validierung ist nicht im Konstruktor: degenerierte Systeme (eine
  Abbildung) bleiben für Tests konstruierbar.
- Beschränkungsradius R = max|a_i| / (1 - max alpha_1(A_i)); die Kugel um 0
  mit Radius R wird von jeder Abbildung in sich abgebildet.
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from blocks.components.linalg.singular_values import SingularSpectrum, as_matrix, singular_values
from blocks.components.symbolic.words import Alphabet
from blocks.components.util.errors import DomainError, IfsValidationError, NumericallySingularError
from blocks.components.util.rng import make_rng

logger = logging.getLogger(__name__)

NORM_HALF = 0.5


class AffineIFS:
    """Finite list of affine maps x -> A_i x + a_i in dimension d."""

    def __init__(self, matrices: Any, translations: Any, name: str = "") -> None:
        mats = [as_matrix(A) for A in matrices]
        if not mats:
            raise DomainError("an IFS needs at least one map")
        d = mats[0].shape[0]
        if any(M.shape[0] != d for M in mats):
            raise DomainError("all matrices must share the same dimension")
        trans = np.asarray(translations, dtype=float).reshape(len(mats), -1)
        if trans.shape != (len(mats), d):
            raise DomainError(f"translations must have shape ({len(mats)}, {d}), got {trans.shape}")
        if not np.all(np.isfinite(trans)):
            raise DomainError("translations have non-finite entries")
        self._matrices = np.stack(mats)
        self._translations = trans.copy()
        self._matrices.setflags(write=False)
        self._translations.setflags(write=False)
        self.name = str(name)

    # --- Grunddaten ----------------------------------------------------------
    @property
    def d(self) -> int:
        return int(self._matrices.shape[1])

    @property
    def n_maps(self) -> int:
        return int(self._matrices.shape[0])

    @property
    def matrices(self) -> np.ndarray:
        return self._matrices

    @property
    def translations(self) -> np.ndarray:
        return self._translations

    @property
    def alphabet(self) -> Alphabet:
        return Alphabet(self.n_maps, strict=self.n_maps >= 2)

    def log_dets(self) -> np.ndarray:
        return np.log(np.abs(np.linalg.det(self._matrices)))

    def spectra(self) -> List[SingularSpectrum]:
        return [singular_values(A) for A in self._matrices]

    def contraction_ratios(self) -> np.ndarray:
        """s_i = alpha_1(A_i), the Lipschitz constant of phi_i."""
        return np.array([s.top for s in self.spectra()])

    def bounding_radius(self) -> float:
        s_max = float(self.contraction_ratios().max())
        if s_max >= 1.0:
            return float("inf")
        return float(np.linalg.norm(self._translations, axis=1).max()) / (1.0 - s_max)

    def apply(self, i: int, x: np.ndarray) -> np.ndarray:
        return self._matrices[i] @ np.asarray(x, dtype=float) + self._translations[i]

    def with_translations(self, flat: Sequence[float], name: Optional[str] = None) -> "AffineIFS":
        """Same linear parts, translations from a flat vector (a_1, ..., a_m)."""
        trans = np.asarray(flat, dtype=float).reshape(self.n_maps, self.d)
        return AffineIFS(self._matrices, trans, name=self.name if name is None else name)

    # --- Serialisierung / Hash -----------------------------------------------
    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "dimension": self.d,
            "maps": [
                {"matrix": A.tolist(), "translation": a.tolist()}
                for A, a in zip(self._matrices, self._translations)
            ],
        }

    def content_hash(self) -> str:
        # float.hex: bitgenau, unabhängig von der Dezimaldarstellung
        payload = {
            "m": [[float(v).hex() for v in A.ravel()] for A in self._matrices],
            "a": [[float(v).hex() for v in a] for a in self._translations],
        }
        return hashlib.sha1(json.dumps(payload, sort_keys=True).encode("utf-8")).hexdigest()[:10]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AffineIFS):
            return NotImplemented
        return (
            self.name == other.name
            and np.array_equal(self._matrices, other._matrices)
            and np.array_equal(self._translations, other._translations)
        )

    def __repr__(self) -> str:
        return f"AffineIFS(name={self.name!r}, d={self.d}, maps={self.n_maps})"


@dataclass
class IfsValidationReport:
    errors: List[str] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)
    ratios: List[float] = field(default_factory=list)
    norm_half_ok: bool = False

    @property
    def ok(self) -> bool:
        return not self.errors


def validate_ifs(ifs: AffineIFS) -> IfsValidationReport:
    """Check non-singularity, contractivity (errors) and |A_i| < 1/2 (warning)."""
    report = IfsValidationReport()
    if ifs.n_maps < 2:
        report.errors.append(f"an IFS needs at least two maps, got {ifs.n_maps}")
    norm_ok = True
    for i, A in enumerate(ifs.matrices):
        try:
            spectrum = singular_values(A)
        except NumericallySingularError as e:
            report.errors.append(f"map {i}: {e}")
            report.ratios.append(float("nan"))
            norm_ok = False
            continue
        report.ratios.append(spectrum.top)
        if spectrum.top >= 1.0:
            report.errors.append(f"map {i}: not contractive (alpha_1 = {spectrum.top:.6g} >= 1)")
        if not spectrum.top < NORM_HALF:
            norm_ok = False
            report.warnings.append(f"map {i}: |A_{i}| = {spectrum.top:.6g} is not < 1/2")
    report.norm_half_ok = norm_ok and not report.errors
    return report


def ensure_valid(ifs: AffineIFS) -> IfsValidationReport:
    report = validate_ifs(ifs)
    for w in report.warnings:
        logger.warning("%s: %s", ifs.name or "ifs", w)
    if not report.ok:
        raise IfsValidationError("; ".join(report.errors), report=report)
    return report


def sample_translations(d: int, count: int, radius: float, seed: int, n_maps: int = 2) -> np.ndarray:
    """Uniform samples from [-radius, radius]^(d * n_maps), one row per sample."""
    if radius <= 0:
        raise DomainError(f"radius must be > 0, got {radius}")
    if count < 0 or d < 1 or n_maps < 1:
        raise DomainError("count >= 0, d >= 1 and n_maps >= 1 required")
    rng = make_rng(seed, 0x7A)
    return rng.uniform(-float(radius), float(radius), size=(int(count), int(d) * int(n_maps)))

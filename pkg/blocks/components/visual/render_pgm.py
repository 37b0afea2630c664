# blocks/components/visual/render_pgm.py
"""
Purpose
-------
Rastert eine Punktwolke als 8-Bit-Graustufenbild (binäres PGM, P5).
Trefferzahlen pro Pixel werden logarithmisch skaliert:
v = round(255 * log1p(c) / log1p(c_max)).

Contracts
---------
def render_pgm(cloud, resolution, bounds=None) -> bytes
def hit_counts(cloud, resolution, bounds=None) -> numpy.ndarray
def default_bounds(cloud) -> tuple[tuple[float, float], tuple[float, float]]

Args
----
resolution : int >= 16, Breite = Höhe
bounds : ((xmin, xmax), (ymin, ymax)); Punkte außerhalb werden verworfen

Returns
-------
bytes : b"P5\\n<w> <h>\\n255\\n" + Zeilen von oben nach unten

Side Effects
------------
Keine.

Notes
-----
- d = 1: alle Punkte auf der mittleren Zeile; d >= 3: die ersten zwei
  Koordinaten.
- y wächst nach oben (Zeile 0 = ymax).
"""

import io
from typing import Optional, Tuple

import numpy as np
from PIL import Image

from blocks.components.affine.chaos_game import PointCloud
from blocks.components.util.errors import DomainError

MIN_RESOLUTION = 16
PAD = 0.01

Bounds = Tuple[Tuple[float, float], Tuple[float, float]]


def default_bounds(cloud: PointCloud) -> Bounds:
    if len(cloud) == 0:
        return (0.0, 1.0), (0.0, 1.0)
    lo, hi = cloud.bounds()
    if cloud.d == 1:
        lo, hi = np.array([lo[0], 0.0]), np.array([hi[0], 0.0])
    out = []
    for a, b in zip(lo[:2], hi[:2]):
        span = float(b - a)
        pad = PAD * span if span > 0 else 0.5
        out.append((float(a) - pad, float(b) + pad))
    return out[0], out[1]


def hit_counts(cloud: PointCloud, resolution: int, bounds: Optional[Bounds] = None) -> np.ndarray:
    """(resolution, resolution) hit counts, row 0 at the top."""
    if resolution < MIN_RESOLUTION:
        raise DomainError(f"resolution must be >= {MIN_RESOLUTION}, got {resolution}")
    res = int(resolution)
    counts = np.zeros(res * res, dtype=np.int64)
    if len(cloud) == 0:
        return counts.reshape(res, res)
    (x0, x1), (y0, y1) = bounds if bounds is not None else default_bounds(cloud)
    if not (x1 > x0 and y1 > y0):
        raise DomainError("bounds must have positive width and height")

    x = cloud.points[:, 0]
    col = np.floor((x - x0) / (x1 - x0) * res).astype(np.int64)
    if cloud.d == 1:
        row = np.full_like(col, res // 2)
        inside = (col >= 0) & (col < res)
    else:
        y = cloud.points[:, 1]
        row = res - 1 - np.floor((y - y0) / (y1 - y0) * res).astype(np.int64)
        inside = (col >= 0) & (col < res) & (row >= 0) & (row < res)
    counts += np.bincount(row[inside] * res + col[inside], minlength=res * res)
    return counts.reshape(res, res)


def render_pgm(cloud: PointCloud, resolution: int, bounds: Optional[Bounds] = None) -> bytes:
    counts = hit_counts(cloud, resolution, bounds)
    c_max = int(counts.max())
    if c_max == 0:
        raster = np.zeros(counts.shape, dtype=np.uint8)
    else:
        raster = np.rint(255.0 * np.log1p(counts) / np.log1p(c_max)).astype(np.uint8)
    out = io.BytesIO()
    Image.fromarray(raster).save(out, format="PPM")
    return out.getvalue()

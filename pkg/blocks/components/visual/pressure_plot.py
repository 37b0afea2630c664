# blocks/components/visual/pressure_plot.py
"""
Purpose
-------
PNG der Druckkurve t -> P_n(t) mit Nulllinie; optional markierte Nullstelle.

Contracts
---------
def plot_pressure_curve(frame, path, root=None, title="") -> pathlib.Path

Args
----
frame : pandas.DataFrame mit Spalten t, n, P_n (eine Zeile pro t und n)

Side Effects
------------
Schreibt eine PNG-Datei (matplotlib, Agg-Backend).
"""

import pathlib
from typing import Optional, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402


def plot_pressure_curve(
    frame: pd.DataFrame,
    path: Union[str, pathlib.Path],
    root: Optional[float] = None,
    title: str = "",
) -> pathlib.Path:
    p = pathlib.Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(6, 4), dpi=120)
    for n, part in frame.groupby("n", sort=True):
        ax.plot(part["t"], part["P_n"], marker="o", ms=3, lw=1, label=f"n={n}")
    ax.axhline(0.0, color="black", lw=0.8)
    if root is not None:
        ax.axvline(root, color="tab:red", lw=0.8, ls="--", label=f"t_n={root:.6g}")
    ax.set_xlabel("t")
    ax.set_ylabel("P_n(t)")
    if title:
        ax.set_title(title)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(p, format="png")
    plt.close(fig)
    return p

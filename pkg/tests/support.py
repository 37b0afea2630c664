import pathlib

import numpy as np

from blocks.components.affine.ifs_model import AffineIFS
from blocks.components.io.ifs_file import parse_ifs_file

SYSTEMS_DIR = pathlib.Path(__file__).resolve().parents[1] / "knowledge" / "systems"


def load_system(name: str) -> AffineIFS:
    return parse_ifs_file(SYSTEMS_DIR / f"{name}.json")


def random_contractive(rng: np.random.Generator, d: int = 2, low: float = 0.1, high: float = 0.9) -> np.ndarray:
    """Random d x d matrix rescaled to a top singular value in [low, high]."""
    A = rng.normal(size=(d, d))
    return A * (rng.uniform(low, high) / np.linalg.norm(A, 2))

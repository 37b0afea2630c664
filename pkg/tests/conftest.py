import pathlib

import pytest

from blocks.components.affine.ifs_model import AffineIFS
from tests.support import SYSTEMS_DIR, load_system


@pytest.fixture
def systems_dir() -> pathlib.Path:
    return SYSTEMS_DIR


@pytest.fixture
def swap_pair() -> AffineIFS:
    return load_system("swap_pair")


@pytest.fixture
def diagonal_triple() -> AffineIFS:
    return load_system("diagonal_triple")


@pytest.fixture
def generic_pair() -> AffineIFS:
    return load_system("generic_pair")


@pytest.fixture
def conformal_pair() -> AffineIFS:
    return load_system("conformal_rotation_pair")


@pytest.fixture
def cantor() -> AffineIFS:
    return load_system("cantor")

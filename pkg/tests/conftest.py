from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from app.discrete.grid import Grid
from app.lie.catalog import catalog
from app.rumin.complex import build_rumin_complex

DATA_DIR = Path(__file__).resolve().parent.parent / "data"


@pytest.fixture(scope="session")
def heisenberg():
    return catalog("heisenberg(1)")


@pytest.fixture(scope="session")
def engel():
    return catalog("engel")


@pytest.fixture(scope="session")
def abelian2():
    return catalog("abelian(2)")


@pytest.fixture(scope="session")
def heisenberg_complex(heisenberg):
    return build_rumin_complex(heisenberg)


@pytest.fixture(scope="session")
def engel_complex(engel):
    return build_rumin_complex(engel)


@pytest.fixture(scope="session")
def abelian2_complex(abelian2):
    return build_rumin_complex(abelian2)


@pytest.fixture(scope="session")
def small_grid(heisenberg):
    """h = 1 on [-2, 2]^3: 125 points, one point with a full d_c^1 stencil"""
    return Grid(heisenberg, ((-2, 2), (-2, 2), (-2, 2)), Fraction(1))


@pytest.fixture(scope="session")
def medium_grid(heisenberg):
    """h = 1 on [-3, 3]^3: 343 points"""
    return Grid(heisenberg, ((-3, 3), (-3, 3), (-3, 3)), Fraction(1))


@pytest.fixture
def rng():
    return np.random.Generator(np.random.PCG64(20240611))


@pytest.fixture(scope="session")
def data_dir():
    return DATA_DIR

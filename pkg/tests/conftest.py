import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from src.cs_energy import CsParams  # noqa: E402
from src.radial_core import Field, Mesh1D  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(2012)


@pytest.fixture
def radial_mesh():
    return Mesh1D.radial(20.0, 2000)


@pytest.fixture
def gaussian(radial_mesh):
    return Field.from_function(radial_mesh, lambda r: np.exp(-r ** 2 / 4.0))


@pytest.fixture
def p2():
    return CsParams(2.0, 0.1)

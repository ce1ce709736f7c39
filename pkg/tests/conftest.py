import numpy as np
import pytest

from mesh_fixtures import l_mesh_case, unitsq4_case, unitsq4_raw


@pytest.fixture
def unitsq4():
    return unitsq4_raw()


@pytest.fixture
def unitsq4_as_case():
    return unitsq4_case()


@pytest.fixture
def l_case():
    return l_mesh_case()


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)

import numpy as np
import pytest

from src.core import FiniteMMSpace
from tests.oracles import simplex_distances


@pytest.fixture
def simplex4():
    return FiniteMMSpace.uniform(simplex_distances(4), label="simplex4", is_metric=True)


@pytest.fixture
def point():
    return FiniteMMSpace.point()


@pytest.fixture
def two_atom():
    """Two equal atoms at distance ``a`` (total mass 1 unless given)."""
    def build(a, total_mass=1.0):
        return FiniteMMSpace.uniform(np.array([[0.0, a], [a, 0.0]]), total_mass=total_mass, is_metric=True)
    return build


@pytest.fixture
def space_file(tmp_path):
    """Save a FiniteMMSpace under tmp_path and return the path as a string."""
    def save(space, name):
        path = tmp_path / name
        space.save(path)
        return str(path)
    return save

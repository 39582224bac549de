import sys
from pathlib import Path

import numpy as np
import pytest

# Make the sibling oracle helpers importable from every test module.
sys.path.insert(0, str(Path(__file__).parent))

from gme.states import SpaceShape, SeparableEnsemble, random_product_state


@pytest.fixture
def rng():
    return np.random.default_rng(20240517)


def random_separable_ensemble(shape: SpaceShape, rng, max_terms: int = 5):
    """A random valid ensemble with 2..max_terms active product terms."""
    k = int(rng.integers(2, max_terms + 1))
    weights = rng.dirichlet(np.ones(k))
    states = tuple(random_product_state(shape, rng) for _ in range(k))
    return SeparableEnsemble(shape, weights, states)

import numpy as np
import pytest

from lart.core import Multiplex


def random_multiplex(rng, num_nodes, num_layers, p=0.3):
    layers = []
    for _ in range(num_layers):
        upper = np.triu(rng.random((num_nodes, num_nodes)) < p, 1)
        layers.append(list(zip(*np.nonzero(upper))))
    return Multiplex(num_nodes, num_layers, tuple(layers))


def copies(num_nodes, edges, num_layers):
    return Multiplex(num_nodes, num_layers, tuple([list(edges)] * num_layers))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def toy():
    """4 nodes, 2 layers; small enough for walk enumeration."""
    return Multiplex(4, 2, (
        [(0, 1), (1, 2), (2, 3)],
        [(0, 1), (0, 2), (1, 2)],
    ))

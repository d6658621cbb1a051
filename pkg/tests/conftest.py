import numpy as np
import pytest

from cspectral.constraints import ConstraintList, materialize
from cspectral.graph import build_laplacian

TOY_A = np.array(
    [
        [0, 1, 1, 0, 0, 0],
        [1, 0, 1, 0, 0, 0],
        [1, 1, 0, 1, 0, 0],
        [0, 0, 1, 0, 1, 1],
        [0, 0, 0, 1, 0, 1],
        [0, 0, 0, 1, 1, 0],
    ],
    dtype=float,
)
TOY_SIDE = np.array([1, 1, 1, 1, -1, -1])
TOY_Q = np.outer(TOY_SIDE, TOY_SIDE).astype(float)


def toy_clist():
    triples = [(i, j, TOY_Q[i, j]) for i in range(6) for j in range(i + 1, 6)]
    return ConstraintList(6, triples, tuple(np.diag(TOY_Q)))


def random_connected(rng, n, density=0.4):
    """Random weighted graph with a spanning path so it is always connected."""
    w = rng.uniform(0.1, 1.0, (n, n)) * (rng.random((n, n)) < density)
    w = np.triu(w, 1)
    perm = rng.permutation(n)
    for a, b in zip(perm[:-1], perm[1:]):
        w[min(a, b), max(a, b)] = rng.uniform(0.1, 1.0)
    return build_laplacian(w + w.T)


def random_symmetric(rng, n, scale=1.0):
    m = rng.normal(0.0, scale, (n, n))
    return (m + m.T) / 2.0


@pytest.fixture
def toy_graph():
    return build_laplacian(TOY_A)


@pytest.fixture
def toy_cm(toy_graph):
    return materialize(toy_clist(), toy_graph)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)

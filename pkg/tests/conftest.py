import numpy as np
import pytest

from hebbiantools.core.network import bidirectional_motif
from hebbiantools.core.systems import DefaultSystem, NetworkSystem
from hebbiantools.lib.equilibria import NewtonConfig


def finite_difference_jacobian(system: DefaultSystem, vector: np.ndarray) -> np.ndarray:
    columns = []
    for index in range(vector.size):
        h = 1e-6 * max(1.0, abs(vector[index]))
        step = np.zeros_like(vector)
        step[index] = h
        columns.append((system.field(vector + step) - system.field(vector - step)) / (2.0 * h))
    return np.column_stack(columns)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def motif_system() -> NetworkSystem:
    return NetworkSystem(bidirectional_motif(a1=0.7, a2=1.3, b1=0.9, b2=1.1, c1=-3.0, c2=2.0))


@pytest.fixture
def newton_cfg() -> NewtonConfig:
    return NewtonConfig(n_starts=256, seed=0)

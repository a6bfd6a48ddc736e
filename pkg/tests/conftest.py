import pathlib

import numpy as np
import pytest

from swiptlqg import load_config
from swiptlqg.model import validate_plant

REPO = pathlib.Path(__file__).resolve().parent.parent
FIG2 = REPO / "configs" / "fig2.toml"


@pytest.fixture(scope="session")
def scalar_plant():
    return validate_plant(1.2, 1, 1, 1, 1, 1, 1)


@pytest.fixture(scope="session")
def fig2_cfg():
    return load_config(FIG2)


@pytest.fixture(scope="session")
def fig2_path():
    return FIG2


@pytest.fixture()
def rng():
    return np.random.default_rng(12345)


def random_stabilizable_plant(n, rng, spectral=1.05):
    """Random plant with |eig(A)| scaled to ``spectral`` and PD weights."""
    A = rng.standard_normal((n, n))
    A *= spectral / max(abs(np.linalg.eigvals(A)))
    B = rng.standard_normal((n, n))
    C = rng.standard_normal((n, n))
    M = rng.standard_normal((n, n))
    Q = M @ M.T + 0.1 * np.eye(n)
    M = rng.standard_normal((n, n))
    R = M @ M.T + 0.1 * np.eye(n)
    M = rng.standard_normal((n, n))
    W = M @ M.T + 0.1 * np.eye(n)
    M = rng.standard_normal((n, n))
    U = M @ M.T + 0.1 * np.eye(n)
    return validate_plant(A, B, C, Q, R, W, U)

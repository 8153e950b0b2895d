import numpy as np
import pytest

from ferrosim.plant import PlantParams, make_model
from ferrosim.servo import ControllerWeights
from ferrosim.workspace import default_rig


@pytest.fixture(scope="session")
def rig():
    return default_rig()


@pytest.fixture(scope="session")
def unit_model():
    return make_model("unit")


@pytest.fixture(scope="session")
def fig2d_model():
    return make_model("fig2d")


@pytest.fixture
def weights():
    return ControllerWeights()


@pytest.fixture
def quiet_params():
    """Deterministic plant: no lag, no drift."""
    return PlantParams(lag_tau=0.0, drift_rms=0.0, seed=1)


def random_scene_arrays(rng: np.random.Generator, radius: float = 4.0):
    """Random particle/target pair inside the disk, at least a deadband apart."""
    while True:
        p = rng.uniform(-radius, radius, 2)
        t = rng.uniform(-radius, radius, 2)
        if np.hypot(*p) < radius * 0.95 and np.hypot(*t) < radius and np.hypot(*(t - p)) > 0.06:
            return p, t

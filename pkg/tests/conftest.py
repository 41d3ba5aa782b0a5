import numpy as np
import pytest

from qsl import scenarios
from qsl.dynamics import evolve
from qsl.states import density_from_pure

PLUS = density_from_pure(scenarios.PLUS).mat
AD_MIXED = np.diag([0.75, 0.25]).astype(complex)
KET0 = np.diag([1.0, 0.0]).astype(complex)


@pytest.fixture(scope="session")
def dephasing_traj():
    return evolve(scenarios.dephasing(1.0), PLUS, 1.0, 1e-3)


@pytest.fixture(scope="session")
def dephasing_mixed_traj():
    rho0 = np.array([[0.6, 0.3], [0.3, 0.4]], dtype=complex)
    return evolve(scenarios.dephasing(1.0), rho0, 1.0, 1e-3)


@pytest.fixture(scope="session")
def ad_mixed_traj():
    return evolve(scenarios.amplitude_damping(1.0), AD_MIXED, 1.0, 1e-3)


@pytest.fixture(scope="session")
def ad_coherent_traj():
    rho0 = np.array([[0.3, 0.35], [0.35, 0.7]], dtype=complex)
    return evolve(scenarios.amplitude_damping(1.0), rho0, 1.0, 1e-3)


@pytest.fixture(scope="session")
def rabi_traj():
    return evolve(scenarios.rabi_drive(np.pi), KET0, 1.0, 1e-3)


@pytest.fixture(scope="session")
def static_traj():
    return evolve(scenarios.dephasing(0.0), PLUS, 1.0, 1e-2)


@pytest.fixture(scope="session")
def static_mixed_traj():
    return evolve(scenarios.dephasing(0.0), AD_MIXED, 1.0, 1e-2)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)

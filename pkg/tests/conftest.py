import numpy as np
import pytest

from dimerqpt.bath import BathParams, build_redfield_generator
from dimerqpt.model import DimerParams, build_exciton_basis
from dimerqpt.pulses import PulseToolbox


@pytest.fixture(scope="session")
def dimer():
    return DimerParams(site_energy_1=12881.0, site_energy_2=12719.0,
                       coupling_j=120.0)


@pytest.fixture(scope="session")
def basis(dimer):
    return build_exciton_basis(dimer)


@pytest.fixture(scope="session")
def bath():
    return BathParams(reorganization_energy=30.0, cutoff_freq=120.0,
                      temperature=298.0)


@pytest.fixture(scope="session")
def gen(basis, bath):
    return build_redfield_generator(basis, bath)


@pytest.fixture(scope="session")
def toolbox():
    return PulseToolbox(freq_plus=13480.0, freq_minus=12130.0,
                        pulse_width_sigma=40.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20260823)

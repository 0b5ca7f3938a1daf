import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("photonvel", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("photonvel")


@pytest.fixture(scope="session")
def gaussian_em():
    from photonvel.emfield import synthesize_em
    from photonvel.spectra import SpectralModel
    return synthesize_em(SpectralModel.gaussian(10.0))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)

import numpy as np
import pytest

from febench import corbino, rydberg


@pytest.fixture(scope="session")
def helium_stark_curve():
    """Stark curve covering the Corbino cell's pressing-field range."""
    return rydberg.stark_response(
        rydberg.helium(), rydberg.helium_grid(), np.linspace(0.0, 9e3, 19)
    )


@pytest.fixture(scope="session")
def saturated_profile():
    """Converged saturated-density profile at the reference bias."""
    geo = corbino.CorbinoGeometry()
    return geo, corbino.saturated_density(geo, corbino.BiasConfig())


@pytest.fixture(scope="session")
def reference_distribution(saturated_profile, helium_stark_curve):
    geo, prof = saturated_profile
    dist = corbino.detuning_distribution(prof, helium_stark_curve, geo=geo)
    return dist

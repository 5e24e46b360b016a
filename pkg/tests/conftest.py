import numpy as np
import pytest
from hypothesis import settings

from pcwqed.atom import GiantAtom
from pcwqed.bloch import ModulationProfile, band_structure, bz_grid, effective_mass_fit
from pcwqed.circuit import calibrated_params, nominal_params

settings.register_profile("suite", deadline=None, derandomize=True)
settings.load_profile("suite")

MHZ = 2 * np.pi * 1e6
GHZ = 2 * np.pi * 1e9


@pytest.fixture(scope="session")
def params():
    return calibrated_params()


@pytest.fixture(scope="session")
def params_literal():
    return nominal_params()


@pytest.fixture(scope="session")
def band(params):
    """Canonical cosine band at the default discretization."""
    return band_structure(ModulationProfile(params), check_convergence=False)


@pytest.fixture(scope="session")
def band_square(params):
    return band_structure(
        ModulationProfile(params, kind="square"), check_convergence=False
    )


@pytest.fixture(scope="session")
def band_coarse(params):
    """Cheap band (dk = 1e-3 km) for randomized property sweeps."""
    return band_structure(
        ModulationProfile(params), bz_grid(params, 1e-3), check_convergence=False
    )


@pytest.fixture(scope="session")
def band_coarse_shifted(params):
    """Shifted coarse band: complex gauge phases exercise the transport."""
    return band_structure(
        ModulationProfile(params, shift=0.13 * params.lambda_m),
        bz_grid(params, 1e-3),
        check_convergence=False,
    )


@pytest.fixture(scope="session")
def em(band):
    return effective_mass_fit(band)


@pytest.fixture(scope="session")
def em_coarse(band_coarse):
    return effective_mass_fit(band_coarse)


@pytest.fixture(scope="session")
def fig_atom(band):
    """Two-leg atom with balanced strengths at dip + following peak."""
    lam = band.params.lambda_m
    return GiantAtom.from_legs(
        [(0.0, 0.04 * MHZ), (0.5 * lam, 0.136 * MHZ)], delta0=0.1 * band.gap
    )

"""Shared fixtures: the n = 50 preset parameter set used across tests."""
import pytest

from rydeit import AtomParams, InteractionParams, StatePreset


@pytest.fixture(scope="session")
def preset50():
    return StatePreset(50)


@pytest.fixture
def params50(preset50):
    """Default dispersive working point at zero probe."""
    return AtomParams(omega_p=0.0, omega_c=preset50.omega_c)


@pytest.fixture
def inter50(preset50):
    return InteractionParams(c6=preset50.c6)

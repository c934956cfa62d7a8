import pytest

from app.schemas.params import ScatterParams


@pytest.fixture
def resonant() -> ScatterParams:
    return ScatterParams(gamma=1.0, delta=0.0)


@pytest.fixture
def detuned() -> ScatterParams:
    return ScatterParams(gamma=1.0, delta=0.5)


@pytest.fixture
def decoupled() -> ScatterParams:
    return ScatterParams(gamma=0.0, delta=1.0)

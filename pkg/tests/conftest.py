"""Shared fixtures."""
import pytest

from zetapprox import create_app
from zetapprox.models import ApproximationModel
from zetapprox.services.model_service import make_preset


@pytest.fixture(autouse=True, scope="session")
def app():
    """Configure logging and a single-worker pool once per session."""
    return create_app("testing")


@pytest.fixture
def zeta1() -> ApproximationModel:
    return make_preset("zeta", 1)


@pytest.fixture
def zeta2() -> ApproximationModel:
    return make_preset("zeta", 2)


@pytest.fixture
def zeta3() -> ApproximationModel:
    return make_preset("zeta", 3)


@pytest.fixture
def two_gamma() -> ApproximationModel:
    return make_preset("two_gamma", 3)


@pytest.fixture
def l4() -> ApproximationModel:
    return make_preset("dirichlet_l4", 3)

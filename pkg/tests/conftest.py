"""Shared fixtures: zero tables and systems are expensive, so they are built once per session."""
import pytest
from hypothesis import HealthCheck, settings

from fblab.core.bessel import compute_zeros
from fblab.core.ratio import RatioEvaluator
from fblab.core.systems import Setting, SystemSpec

settings.register_profile(
    "fblab",
    max_examples=25,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture],
)
settings.load_profile("fblab")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: runs every verification suite")


@pytest.fixture(scope="session")
def zeros_zero():
    """First 2000 zeros of J_0."""
    return compute_zeros(0.0, 2000)


@pytest.fixture(scope="session")
def ratio_zero():
    return RatioEvaluator.build(0.0, n_max=64)


@pytest.fixture(scope="session")
def ratio_half():
    return RatioEvaluator.build(0.5, n_max=64)


@pytest.fixture(scope="session")
def essential_zero(ratio_zero):
    return SystemSpec(Setting.ESSENTIAL, ratio=ratio_zero)


@pytest.fixture(scope="session")
def essential_half(ratio_half):
    return SystemSpec(Setting.ESSENTIAL, ratio=ratio_half)


@pytest.fixture(scope="session")
def lebesgue_zero(ratio_zero):
    return SystemSpec(Setting.LEBESGUE, ratio=ratio_zero)


@pytest.fixture(scope="session")
def jacobi_system():
    return SystemSpec(Setting.JACOBI, alpha=0.5, beta=-0.25)

"""
Pytest configuration and fixtures for the algebra, series and model tests.
"""
import random

import pytest

from src.config.settings import ModelConfig
from src.model import build_model
from src.models.equation_spec import bundled_spec


def pytest_addoption(parser):
    parser.addoption(
        "--full",
        action="store_true",
        default=False,
        help="Run the acceptance-size sweeps marked slow",
    )


@pytest.fixture(scope="session")
def full_mode(request) -> bool:
    return request.config.getoption("--full")


@pytest.fixture(autouse=True)
def skip_slow_without_full(request, full_mode: bool):
    """Auto-skip slow sweeps unless --full is given."""
    if request.node.get_closest_marker("slow") and not full_mode:
        pytest.skip("acceptance sweep requires --full")


@pytest.fixture(scope="session")
def phi4():
    return bundled_spec("phi4")


@pytest.fixture(scope="session")
def toy():
    return bundled_spec("toy_1plus1")


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240607)


@pytest.fixture(scope="session")
def toy_model(toy):
    """Small 2-d grid; cached convolutions are shared across the model tests."""
    return build_model(toy, ModelConfig(points=32, spacing=1 / 32), seed=7)

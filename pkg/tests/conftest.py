"""Fixtures."""

from pathlib import Path
from typing import Any

import numpy as np
import pytest

from hypcount.group.spec import GroupSpec
from hypcount.io.schema import load_group

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def pytest_addoption(parser: Any) -> None:
    parser.addoption("--runslow", action="store_true", default=False, help="run slow tests")


def pytest_configure(config: Any) -> None:
    config.addinivalue_line("markers", "slow: mark test as slow to run")


def pytest_collection_modifyitems(config: Any, items: Any) -> None:
    if config.getoption("--runslow"):
        # --runslow given in cli: do not skip slow tests
        return
    skip_slow = pytest.mark.skip(reason="need --runslow option to run")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def generator() -> np.random.Generator:
    return np.random.default_rng(47)


@pytest.fixture(scope="session")
def cyclic() -> GroupSpec:
    return load_group(FIXTURES / "cyclic.grp")


@pytest.fixture(scope="session")
def schottky() -> GroupSpec:
    return load_group(FIXTURES / "schottky.grp")


@pytest.fixture(scope="session")
def schottky3() -> GroupSpec:
    return load_group(FIXTURES / "schottky3.grp")


@pytest.fixture(scope="session")
def three_gen() -> GroupSpec:
    return load_group(FIXTURES / "three_gen.grp")


@pytest.fixture(scope="session")
def parabolic() -> GroupSpec:
    return load_group(FIXTURES / "parabolic.grp")

from __future__ import annotations

import sys
from pathlib import Path

import pytest

# oracle.py / gen.py live next to the tests and are imported by name.
sys.path.insert(0, str(Path(__file__).parent))

from plconf.fixtures import load_fixture


@pytest.fixture(scope="session")
def dell():
    return load_fixture("dell")


@pytest.fixture(scope="session")
def dell_model(dell):
    return dell[0]


@pytest.fixture(scope="session")
def dell_catalog(dell):
    return dell[1]


@pytest.fixture(scope="session")
def fig1():
    return load_fixture("fig1")


@pytest.fixture(scope="session")
def fig1_model(fig1):
    return fig1[0]


@pytest.fixture(scope="session")
def fig1_catalog(fig1):
    return fig1[1]

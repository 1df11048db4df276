"""Shared fixtures: a uniform law, a small interval class, and a fixed seed."""

import pytest

from empbridge import Distribution, FunctionClass, SeedSpec

MASTER_SEED = 20260815


@pytest.fixture(scope="session")
def uniform():
    return Distribution("uniform")


@pytest.fixture(scope="session")
def intervals():
    return FunctionClass("intervals", envelope=1.0, mesh_size=201)


@pytest.fixture()
def seed():
    return SeedSpec(MASTER_SEED, 0)

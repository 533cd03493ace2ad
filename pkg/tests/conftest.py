"""Shared fixtures: the worked example communities and random generators."""

from pathlib import Path

import numpy as np
import pytest

from ecodiv import make_community

DATA_DIR = Path(__file__).resolve().parent.parent / "data"


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture
def community_a():
    """Four equally common species: the maximal-evenness case."""
    return make_community("A", [(f"s{i}", 0.25) for i in range(1, 5)])


@pytest.fixture
def community_b():
    """Two live species at 1:3 plus two zero-share species."""
    return make_community(
        "B", [("s1", 0.25), ("s2", 0.75), ("s3", 0.0), ("s4", 0.0)]
    )


@pytest.fixture
def community_c():
    """Gentle abundance gradient over four species."""
    return make_community("C", [("s1", 0.1), ("s2", 0.2), ("s3", 0.3), ("s4", 0.4)])


def random_community(rng: np.random.Generator, max_species: int = 50, name="random"):
    """A community with 1..max_species species and Dirichlet-ish weights."""
    s = int(rng.integers(1, max_species + 1))
    weights = rng.random(s) + 1e-6
    entries = [(f"sp{i}", float(w)) for i, w in enumerate(weights)]
    return make_community(name, entries, unit="count")

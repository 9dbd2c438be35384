"""
Pytest configuration and fixtures for twoweight lab tests
"""

import os
import sys
import tempfile
from fractions import Fraction
from pathlib import Path

import pytest

# Add the project root to the Python path
ROOT = Path(__file__).parent.parent
sys.path.insert(0, str(ROOT))

# Test environment variables
TEST_ENV_VARS = {
    "TWOWEIGHT_CONFIG": str(ROOT / "twoweight_config.yaml"),
    "TWOWEIGHT_THREADS": "2",
    "FLASK_ENV": "testing",
    "FLASK_DEBUG": "false",
}

# app.py builds its family registry at import time, before any fixture runs
os.environ.setdefault("TWOWEIGHT_CONFIG", TEST_ENV_VARS["TWOWEIGHT_CONFIG"])

from dyadic.families import WeightFamilySpec, generate_weight  # noqa: E402
from dyadic.tree import DyadicTree  # noqa: E402
from models.data_models import GoodnessParams, Weight, WeightPair  # noqa: E402


@pytest.fixture(scope="session", autouse=True)
def setup_test_environment():
    """Set up test environment variables"""
    original_env = {}

    for key, value in TEST_ENV_VARS.items():
        original_env[key] = os.environ.get(key)
        os.environ[key] = value

    yield

    for key, original_value in original_env.items():
        if original_value is None:
            os.environ.pop(key, None)
        else:
            os.environ[key] = original_value


@pytest.fixture
def temp_dir():
    """Create a temporary directory for tests"""
    with tempfile.TemporaryDirectory() as tmp_dir:
        yield Path(tmp_dir)


def make_pair(sigma_family: str, w_family: str, depth: int, seed: int = 0) -> WeightPair:
    tree = DyadicTree(depth)
    sigma = generate_weight(WeightFamilySpec.parse(sigma_family), tree, seed, "sigma")
    w = generate_weight(WeightFamilySpec.parse(w_family), tree, seed, "w")
    return WeightPair(sigma, w)


@pytest.fixture
def params():
    """Default goodness parameters ε = 0.2, r = 2"""
    return GoodnessParams(0.2, 2)


@pytest.fixture
def uniform_pair():
    """Uniform σ and w at depth 4"""
    return make_pair("uniform", "uniform", 4)


@pytest.fixture
def random_pair():
    """Exponential masses on both sides at depth 5, seed 3"""
    return make_pair("random_masses", "random_masses", 5, seed=3)


@pytest.fixture
def single_atom_pair():
    """σ: mass 1 at 1/4, w: mass 1 at 3/4"""
    sigma = Weight.from_arrays([Fraction(1, 4)], [1.0])
    w = Weight.from_arrays([Fraction(3, 4)], [1.0])
    return WeightPair(sigma, w)


@pytest.fixture
def rank_one_pair():
    """σ: mass 4 at 1/3, w: mass 9 at 2/3"""
    sigma = Weight.from_arrays([Fraction(1, 3)], [4.0])
    w = Weight.from_arrays([Fraction(2, 3)], [9.0])
    return WeightPair(sigma, w)


@pytest.fixture
def flask_test_client():
    """Flask test client for API testing"""
    from app import app

    app.config["TESTING"] = True

    with app.test_client() as client:
        with app.app_context():
            yield client

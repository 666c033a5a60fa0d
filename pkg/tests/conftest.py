import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from biaslens import fixtures
from biaslens.metrics import DecisionPolicy


@pytest.fixture(scope="session")
def demo_log():
    return fixtures.demo_identification_log()


@pytest.fixture(scope="session")
def benchmark_dataset():
    return fixtures.benchmark_session_dataset()


@pytest.fixture(scope="session")
def benchmark_policy():
    return DecisionPolicy(kind="score_threshold", theta=fixtures.BENCHMARK_THETA)


@pytest.fixture(scope="session")
def prior_dataset():
    return fixtures.prior_demo_dataset()


@pytest.fixture()
def demo_files(tmp_path):
    """The demo log written to disk; returns the three paths."""
    predictions, attributes, schema = fixtures.demo_log_files()
    paths = {
        "predictions": tmp_path / "predictions.csv",
        "attributes": tmp_path / "attributes.csv",
        "schema": tmp_path / "schema.json",
    }
    paths["predictions"].write_text(predictions)
    paths["attributes"].write_text(attributes)
    paths["schema"].write_text(schema)
    return paths


@pytest.fixture(scope="session")
def benchmark_files_text():
    return fixtures.benchmark_session_files()


@pytest.fixture()
def benchmark_files(tmp_path, benchmark_files_text):
    predictions, attributes, schema = benchmark_files_text
    paths = {
        "predictions": tmp_path / "bench-predictions.csv",
        "attributes": tmp_path / "bench-attributes.csv",
        "schema": tmp_path / "bench-schema.json",
    }
    paths["predictions"].write_text(predictions)
    paths["attributes"].write_text(attributes)
    paths["schema"].write_text(schema)
    return paths

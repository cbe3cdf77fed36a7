import os
from pathlib import Path

import numpy as np
import pytest

from mrsqm.schemas.dataset import TimeSeriesDataset
from mrsqm.schemas.run_config import RunConfig
from mrsqm.schemas.symbolic import SymbolicSequence
from mrsqm.services.dataset_loader import save_ts
from mrsqm.services.pipeline import MrsqmClassifier

SEED = 12334567


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: acceptance-scale checks (deselect with -m 'not slow')")


def make_toy_dataset(rng: np.random.Generator, n_per_class: int = 10, L: int = 48, noise: float = 0.1):
    """Two well separated classes: a fast sine and a slow square wave."""
    t = np.arange(L)
    sine = np.sin(2 * np.pi * t / 8)
    square = np.sign(np.sin(2 * np.pi * t / 24) + 1e-9)
    rows, labels = [], []
    for i in range(n_per_class):
        rows.append(sine + noise * rng.standard_normal(L))
        labels.append("sine")
        rows.append(square + noise * rng.standard_normal(L))
        labels.append("square")
    return TimeSeriesDataset(X=np.vstack(rows), labels=labels, class_index={"sine": 0, "square": 1})


@pytest.fixture(scope="function")
def rng():
    """Seeded generator; identical numbers on every run."""
    return np.random.default_rng(SEED)


@pytest.fixture(scope="function")
def toy_dataset(rng):
    return make_toy_dataset(rng)


@pytest.fixture(scope="function")
def toy_test_dataset():
    return make_toy_dataset(np.random.default_rng(SEED + 1), n_per_class=5)


@pytest.fixture(scope="function")
def toy_ts_file(toy_dataset, tmp_path) -> Path:
    path = tmp_path / "Toy_TRAIN.ts"
    save_ts(toy_dataset, path)
    return path


@pytest.fixture(scope="function")
def write_file(tmp_path):
    """Write text to a file under tmp_path and return its path."""
    def _write(name: str, text: str) -> Path:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path
    return _write


@pytest.fixture(scope="function")
def make_sequences():
    """Build SymbolicSequence objects from space-separated word strings."""
    def _make(texts):
        return [SymbolicSequence(words=text.split()) for text in texts]
    return _make


@pytest.fixture(scope="session")
def ucr_dir() -> Path:
    directory = os.environ.get("MRSQM_UCR_DIR")
    if not directory:
        pytest.skip("MRSQM_UCR_DIR is not set")
    return Path(directory)


@pytest.fixture(scope="function")
def make_dataset():
    return make_toy_dataset


@pytest.fixture(scope="function")
def small_config():
    return RunConfig.for_transform("sfa", k=1, features_per_rep=30, seed=42)


@pytest.fixture(scope="function")
def fitted_classifier(small_config, toy_dataset):
    classifier = MrsqmClassifier(small_config)
    classifier.fit(toy_dataset)
    return classifier

"""Shared fixtures: toy data, optional real-dataset discovery, acceptance log.

Real datasets are looked up under $DASVDD_DATA_DIR (or <repo>/data as a
fallback) and the tests that need them skip with a pointer to the README
when the files are absent. The acceptance suite records one line per
criterion; the summary hook prints them after the run.
"""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np
import pytest

_ACCEPTANCE_RECORDS: list[tuple[int, str, str]] = []


class AcceptanceLog:
    """Records pass/fail/skip per acceptance criterion for the summary."""

    def check(self, criterion: int, passed: bool, detail: str) -> None:
        _ACCEPTANCE_RECORDS.append((criterion, "PASS" if passed else "FAIL", detail))
        assert passed, f"criterion {criterion}: {detail}"

    def skip(self, criterion: int, reason: str) -> None:
        _ACCEPTANCE_RECORDS.append((criterion, "SKIP", reason))
        pytest.skip(reason)


@pytest.fixture
def acceptance() -> AcceptanceLog:
    return AcceptanceLog()


def pytest_terminal_summary(terminalreporter, exitstatus, config) -> None:
    if not _ACCEPTANCE_RECORDS:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, status, detail in sorted(_ACCEPTANCE_RECORDS):
        terminalreporter.write_line(f"criterion {criterion:>2}: {status:<4} {detail}")


def data_dir() -> Path:
    env = os.environ.get("DASVDD_DATA_DIR")
    if env:
        return Path(env)
    return Path(__file__).resolve().parent.parent / "data"


def _first_existing(directory: Path, names: list[str]) -> Path | None:
    for name in names:
        candidate = directory / name
        if candidate.is_file():
            return candidate
    return None


def mnist_paths() -> dict[str, Path] | None:
    """IDX file quartet under the data directory, or None if incomplete."""
    base = data_dir()
    wanted = {
        "train_images": ["train-images-idx3-ubyte", "train-images.idx3-ubyte"],
        "train_labels": ["train-labels-idx1-ubyte", "train-labels.idx1-ubyte"],
        "test_images": ["t10k-images-idx3-ubyte", "t10k-images.idx3-ubyte"],
        "test_labels": ["t10k-labels-idx1-ubyte", "t10k-labels.idx1-ubyte"],
    }
    found = {key: _first_existing(base, names) for key, names in wanted.items()}
    if any(path is None for path in found.values()):
        return None
    return found


def pima_path() -> Path | None:
    candidate = data_dir() / "pima.csv"
    return candidate if candidate.is_file() else None


MNIST_SKIP = (
    f"MNIST IDX files not found under {data_dir()}; "
    "set DASVDD_DATA_DIR or place them in data/ (see README)"
)
PIMA_SKIP = (
    f"pima.csv not found under {data_dir()}; "
    "set DASVDD_DATA_DIR or place it in data/ (see README)"
)


@pytest.fixture(scope="session")
def toy_data() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Separable 2-D toy set: tight normal cluster, distant anomalies.

    Returns (train_normals, test_features, test_labels).
    """
    rng = np.random.default_rng(7)
    train = rng.normal(loc=(1.0, 1.0), scale=0.1, size=(400, 2))
    test_normals = rng.normal(loc=(1.0, 1.0), scale=0.1, size=(100, 2))
    test_anomalies = rng.normal(loc=(-3.0, -3.0), scale=0.1, size=(40, 2))
    test_x = np.vstack([test_normals, test_anomalies])
    test_y = np.concatenate([np.zeros(100, dtype=np.int64), np.ones(40, dtype=np.int64)])
    return train, test_x, test_y

"""Shared fixtures: on-disk dataset files, registry, acceptance reporting.

The acceptance suite exercises the real file pipeline, so session setup
writes the sklearn-bundled datasets (iris, breast-cancer/WDBC, digits) to
CSV in a session temp directory together with a registry. Datasets that
have no offline source (UCI glass, MNIST) get registry entries pointing at
``data/`` under the repo root; drop the files there to activate the
criteria that need them.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np
import pytest

REPO_ROOT = Path(__file__).resolve().parent.parent
USER_DATA_DIR = REPO_ROOT / "data"

# (criterion, passed, detail) triples; printed at the end of the session.
ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


def record_criterion(name: str, passed: bool, detail: str):
    ACCEPTANCE_RESULTS.append((name, passed, detail))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in ACCEPTANCE_RESULTS:
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"{status} {name}: {detail}")


def _write_csv(path: Path, samples: np.ndarray, labels) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        for row, label in zip(samples, labels):
            writer.writerow([repr(float(v)) for v in row] + [str(label)])


@pytest.fixture(scope="session")
def data_dir(tmp_path_factory) -> Path:
    from sklearn.datasets import load_breast_cancer, load_digits, load_iris

    directory = tmp_path_factory.mktemp("datasets")
    for name, bunch in (
        ("iris", load_iris()),
        ("cancer", load_breast_cancer()),
        ("digits", load_digits()),
    ):
        _write_csv(directory / f"{name}.csv", bunch.data, bunch.target)

    lines = [
        "[iris]",
        "path = iris.csv",
        "k = 3",
        "n_features = 4",
        "",
        "[cancer]",
        "path = cancer.csv",
        "k = 2",
        "n_features = 30",
        "",
        "[digits]",
        "path = digits.csv",
        "k = 10",
        "n_features = 64",
        "",
        "[digits1k]",
        "path = digits.csv",
        "k = 10",
        "n_features = 64",
        "subsample_count = 1000",
        "subsample_seed = 7",
        "",
        "[glass]",
        f"path = {USER_DATA_DIR / 'glass.csv'}",
        "k = 6",
        "n_features = 9",
        "",
        "[mnist1k]",
        f"path = {USER_DATA_DIR / 'mnist.csv'}",
        "k = 10",
        "n_features = 784",
        "subsample_count = 1000",
        "subsample_seed = 7",
    ]
    (directory / "registry.ini").write_text("\n".join(lines) + "\n", encoding="utf-8")
    return directory


@pytest.fixture(scope="session")
def registry(data_dir):
    from hdclust.datasets import load_registry

    return load_registry(data_dir / "registry.ini")


@pytest.fixture(scope="session")
def iris(registry):
    from hdclust.datasets import load

    return load(registry["iris"])


@pytest.fixture(scope="session")
def cancer(registry):
    from hdclust.datasets import load

    return load(registry["cancer"])


@pytest.fixture(scope="session")
def digits1k(registry):
    from hdclust.datasets import load

    return load(registry["digits1k"])

from __future__ import annotations

from pathlib import Path

import pytest

REPO_ROOT = Path(__file__).resolve().parent.parent


@pytest.fixture(scope="session")
def repo_root() -> Path:
    return REPO_ROOT


@pytest.fixture(scope="session")
def ghana_fixtures_dir(repo_root) -> Path:
    return repo_root / "fixtures" / "ghana"


@pytest.fixture(scope="session")
def demo_fixtures_dir(repo_root) -> Path:
    return repo_root / "fixtures" / "demo"


@pytest.fixture(scope="session")
def golden_dir(repo_root) -> Path:
    return repo_root / "tests" / "golden"

"""Shared test setup.

Puts the project root on ``sys.path`` so ``netustat`` imports without an
install, and skips ``slow`` tests unless ``RUN_SLOW=1``.
"""

import os
import sys
from pathlib import Path

import numpy as np
import pytest

# Ensure project root is on sys.path for module imports
ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

RUN_SLOW = os.environ.get("RUN_SLOW") == "1"


def pytest_collection_modifyitems(config, items):
    if RUN_SLOW:
        return
    skip = pytest.mark.skip(reason="RUN_SLOW!=1")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.fixture
def rng() -> np.random.Generator:
    """Fixed-seed generator for tests that need random inputs."""
    return np.random.default_rng(20240611)

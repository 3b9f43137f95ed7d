import sys
from functools import lru_cache
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from cdgl.fixtures import fixture  # noqa: E402


@lru_cache(maxsize=None)
def cached_fixture(name, truncation=6):
    return fixture(name, truncation)


@pytest.fixture
def fx():
    return cached_fixture

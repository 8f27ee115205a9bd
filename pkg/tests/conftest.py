from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from chordblocks.theory import Key


@pytest.fixture
def c_major() -> Key:
    return Key.of("C")


@pytest.fixture
def store_dir(tmp_path) -> Path:
    store = tmp_path / "store"
    store.mkdir()
    return store

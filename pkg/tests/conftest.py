"""Shared fixtures: one extracted WordNet directory and loaded database."""

from __future__ import annotations

import sys
from pathlib import Path

import pytest

REPO_ROOT = Path(__file__).resolve().parent.parent
SCRIPTS_DIR = REPO_ROOT / "scripts"
if str(SCRIPTS_DIR) not in sys.path:
    sys.path.insert(0, str(SCRIPTS_DIR))

from fetch_wordnet import extract_wordnet  # noqa: E402

from senseforge.wordnet import load_wordnet  # noqa: E402


@pytest.fixture(scope="session")
def wn_dir(tmp_path_factory) -> Path:
    """The vendored WordNet 3.0 database extracted into a temp directory."""
    return extract_wordnet(tmp_path_factory.mktemp("wordnet"))


@pytest.fixture(scope="session")
def db(wn_dir):
    """The loaded WordNet database, shared read-only across the session."""
    return load_wordnet(wn_dir)

"""Shared fixtures; helper functions live in _helpers.py."""

from __future__ import annotations

import pathlib

import pytest

from _helpers import SCENARIOS


@pytest.fixture(scope="session")
def scenarios_dir() -> pathlib.Path:
    return SCENARIOS

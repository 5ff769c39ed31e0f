"""Shared fixtures."""

import sys
from pathlib import Path

import pytest

# Add repository root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from agents import make_rng  # noqa: E402
from simulation import SimConfig  # noqa: E402


@pytest.fixture
def rng():
    return make_rng(12345)


@pytest.fixture
def small_config():
    """A trial that finishes in well under a second."""
    return SimConfig(n_traders=40, event_rate=10.0, gamma=1.5, max_events=2000, seed=7)


@pytest.fixture(autouse=True)
def no_env_seed(monkeypatch):
    monkeypatch.delenv("LEVY_AUCTION_SEED", raising=False)

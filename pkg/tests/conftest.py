from __future__ import annotations

import json
from pathlib import Path

import pytest

from btcforecast.sentiment import Lexicon

REPO_ROOT = Path(__file__).resolve().parent.parent
FIXTURES_DIR = REPO_ROOT / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES_DIR


@pytest.fixture(scope="session")
def bitstamp_payload() -> dict:
    return json.loads((FIXTURES_DIR / "bitstamp_ticker" / "000.json").read_text("utf-8"))


@pytest.fixture(scope="session")
def example_lexicon() -> Lexicon:
    # the two-word lexicon used throughout the scoring examples
    return Lexicon({"good": 0.7, "bad": -0.7})


@pytest.fixture()
def replay_server(fixtures_dir):
    from btcforecast.ingest import ReplayServer

    with ReplayServer(fixtures_dir) as server:
        yield server

from __future__ import annotations

import sys
from datetime import datetime, timedelta, timezone
from pathlib import Path

import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")

T0 = datetime(2014, 8, 24, 0, 0, tzinfo=timezone.utc)


def at(hours: float = 0.0, minutes: float = 0.0) -> datetime:
    return T0 + timedelta(hours=hours, minutes=minutes)


@pytest.fixture(scope="session")
def scenario():
    from triage import synthetic

    return synthetic.generate()


@pytest.fixture(scope="session")
def sentiment_model(scenario):
    from triage.sentiment import SentimentConfig, train_sentiment

    cfg = SentimentConfig(subsample=0.0)
    return train_sentiment(scenario.sentiment_train, scenario.sentiment_test, (), cfg, seed=0)


@pytest.fixture(scope="session")
def demo_runs(tmp_path_factory):
    """Two full demo runs into separate directories; the first one is timed."""
    import time

    from triage.cli import main

    dirs, elapsed = [], []
    for name in ("demo_a", "demo_b"):
        out = tmp_path_factory.mktemp(name)
        t0 = time.perf_counter()
        status = main(["demo", "--out", str(out)])
        elapsed.append(time.perf_counter() - t0)
        assert status == 0
        dirs.append(out)
    return dirs[0], dirs[1], elapsed[0]


# acceptance results, one line per criterion, echoed at the end of the session
ACCEPTANCE: list[tuple[str, bool, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for name, ok, detail in sorted(ACCEPTANCE, key=lambda r: r[0]):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")

import json
from pathlib import Path

import numpy as np
import pytest

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA


@pytest.fixture(scope="session")
def stat_oracles():
    with open(DATA / "stat_oracles.json", encoding="utf-8") as fh:
        return json.load(fh)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# -- acceptance summary ---------------------------------------------------------

_CRITERIA = {}


def pytest_runtest_logreport(report):
    marker = _ITEM_CRITERIA.get(report.nodeid)
    if marker is None:
        return
    number, title = marker
    outcome = _CRITERIA.get(number, (title, "PASS"))[1]
    if report.skipped:
        outcome = "SKIP" if outcome == "PASS" else outcome
    elif report.failed:
        outcome = "FAIL"
    _CRITERIA[number] = (title, outcome)


_ITEM_CRITERIA = {}


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            _ITEM_CRITERIA[item.nodeid] = m.args


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, outcome = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number:2d} {outcome}: {title}")

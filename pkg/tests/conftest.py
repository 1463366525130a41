import os
from datetime import datetime, timezone

import pytest

DATA = os.path.join(os.path.dirname(__file__), "..", "src", "ldit", "data")

ISS_LINES = (
    "ISS (ZARYA)",
    "1 25544U 98067A   08264.51782528 -.00002182  00000-0 -11606-4 0  2927",
    "2 25544  51.6416 247.4627 0006703 130.5360 325.0288 15.72125391563537",
)

EPOCH = datetime(2024, 3, 1, tzinfo=timezone.utc)


def data_path(name):
    return os.path.join(DATA, name)


@pytest.fixture
def iss_text():
    return "\n".join(ISS_LINES) + "\n"


_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number and short title")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    n, title = mark.args
    prev = _CRITERIA.get(n, (title, True))
    if rep.failed or (rep.when == "call" and rep.skipped):
        _CRITERIA[n] = (title, False)
    elif rep.when == "call":
        _CRITERIA[n] = (title, prev[1])


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        title, ok = _CRITERIA[n]
        terminalreporter.write_line(f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {title}")

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_ac_outcomes = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): acceptance criterion check")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    number, title = marker.args
    prev = _ac_outcomes.get(number, (title, True))
    failed = rep.failed or (rep.when == "call" and rep.skipped)
    _ac_outcomes[number] = (title, prev[1] and not failed)


def pytest_terminal_summary(terminalreporter):
    if not _ac_outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ac_outcomes):
        title, ok = _ac_outcomes[number]
        terminalreporter.write_line(f"AC{number:<2d} {'PASS' if ok else 'FAIL'}  {title}")

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

# criterion number -> (title, PASS/FAIL), printed after the run
_acceptance: dict[int, tuple[str, str]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    mark = item.get_closest_marker("acceptance")
    report = outcome.get_result()
    if mark is None or (report.when != "call" and report.passed):
        return
    num, title = mark.args
    prev = _acceptance.get(num, (title, "PASS"))[1]
    _acceptance[num] = (title, "PASS" if report.passed and prev == "PASS" else "FAIL")


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_acceptance):
        title, status = _acceptance[num]
        terminalreporter.write_line(f"criterion {num}: {status}  {title}")

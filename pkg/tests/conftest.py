import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

# criterion number -> [title, passed, failed]
_criteria: dict = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        rep.criterion = (marker.args[0], marker.kwargs.get("title", ""))


def pytest_runtest_logreport(report):
    crit = getattr(report, "criterion", None)
    if crit is None:
        return
    n, title = crit
    entry = _criteria.setdefault(n, [title, 0, 0])
    if report.when == "call" and report.passed:
        entry[1] += 1
    elif report.failed:
        entry[2] += 1


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        title, passed, failed = _criteria[n]
        status = "PASS" if failed == 0 and passed > 0 else "FAIL"
        terminalreporter.write_line(
            f"criterion {n}: {status}  {title} ({passed} passed, {failed} failed)")

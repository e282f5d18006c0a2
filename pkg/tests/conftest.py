"""Collects acceptance outcomes and prints one PASS/FAIL line per criterion."""

import pytest

_OUTCOMES: dict[int, dict] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    entry = _OUTCOMES.setdefault(number, {"title": title, "passed": True, "ran": False, "detail": ""})
    if report.when == "call":
        entry["ran"] = True
        entry["detail"] = getattr(item, "criterion_detail", "")
    if report.failed:
        entry["passed"] = False
        entry["detail"] = report.longreprtext.strip().splitlines()[-1] if report.longreprtext else "error"


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_OUTCOMES):
        e = _OUTCOMES[number]
        status = "PASS" if e["passed"] and e["ran"] else "FAIL"
        line = f"[{status}] criterion {number}: {e['title']}"
        if e["detail"]:
            line += f" -- {e['detail']}"
        terminalreporter.write_line(line)

"""Collects acceptance-criterion outcomes and prints one line per criterion."""

import pytest

_RESULTS = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    number, title = mark.args
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        notes = [v for k, v in report.user_properties if k == "measured"]
        _RESULTS[number] = (title, report.outcome, getattr(report, "longrepr", None), notes)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_RESULTS):
        title, outcome, longrepr, notes = _RESULTS[number]
        verdict = "PASS" if outcome == "passed" else "FAIL"
        tr.write_line(f"criterion {number:>2}: {verdict}  {title}")
        for note in notes:
            tr.write_line(f"      {note}")
        if verdict == "FAIL" and longrepr is not None:
            crash = getattr(longrepr, "reprcrash", None)
            text = crash.message if crash is not None else str(longrepr)
            for line in text.splitlines():
                if line.lstrip().startswith("- "):
                    tr.write_line(f"      FAILED {line.strip()[2:]}")

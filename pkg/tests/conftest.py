"""Collects the acceptance-criterion outcomes and prints one line for each."""

import re

_CRITERIA: dict = {}
_PATTERN = re.compile(r"test_criterion_(\d+)_")


def pytest_runtest_logreport(report):
    m = _PATTERN.search(report.nodeid)
    if not m:
        return
    num = int(m.group(1))
    entry = _CRITERIA.setdefault(num, {"ok": True, "seconds": 0.0, "title": report.nodeid.split("::")[-1]})
    if report.when == "call":
        entry["seconds"] += report.duration
    if report.failed or (report.when == "setup" and report.skipped):
        entry["ok"] = False


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        e = _CRITERIA[num]
        title = _PATTERN.sub("", e["title"]).replace("_", " ")
        status = "PASS" if e["ok"] else "FAIL"
        terminalreporter.write_line(f"criterion {num:2d}  {status}  {title}  ({e['seconds']:.1f} s)")

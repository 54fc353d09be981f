import re
from collections import OrderedDict

_CRITERIA: "OrderedDict[int, dict]" = OrderedDict()
_NAME = re.compile(r"test_criterion_(\d+)_([a-z0-9_]+?)(?:\[.*\])?$")


def pytest_runtest_logreport(report):
    m = _NAME.search(report.nodeid.split("::")[-1])
    if not m:
        return
    if report.when != "call" and not (report.failed or report.skipped):
        return
    num = int(m.group(1))
    entry = _CRITERIA.setdefault(num, {"title": m.group(2).replace("_", " "), "ok": True,
                                       "seen": False})
    entry["seen"] = entry["seen"] or report.when == "call"
    if report.failed or report.skipped:
        entry["ok"] = False


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        e = _CRITERIA[num]
        status = "PASS" if e["ok"] and e["seen"] else "FAIL"
        terminalreporter.write_line(f"criterion {num} {e['title']}: {status}")

import re

_results = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_c(\d+)_(\w+)", report.nodeid)
    if not m:
        return
    key = (int(m.group(1)), m.group(2))
    if report.when == "call" or report.failed or report.skipped:
        if report.failed:
            _results[key] = "FAIL"
        elif report.skipped:
            _results.setdefault(key, "SKIP")
        else:
            _results.setdefault(key, "PASS")


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for (num, name), verdict in sorted(_results.items()):
        terminalreporter.write_line(f"criterion {num:2d} {name:<28} {verdict}")

import pytest

_outcomes = {}


def pytest_runtest_logreport(report):
    label = dict(report.user_properties).get("criterion")
    if label is None:
        return
    failed = report.failed or (report.when == "call" and report.skipped)
    if report.when == "call" or failed:
        if failed or label not in _outcomes:
            _outcomes[label] = "FAIL" if failed else "PASS"


@pytest.hookimpl(tryfirst=True)
def pytest_runtest_setup(item):
    mark = item.get_closest_marker("criterion")
    if mark is not None:
        item.user_properties.append(("criterion", mark.args[0]))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_outcomes, key=lambda s: int(s.split()[0][1:])):
        terminalreporter.write_line(f"{_outcomes[label]}  {label}")

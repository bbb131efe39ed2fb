from __future__ import annotations

import pytest

# Acceptance criteria report one pass/fail line each at the end of the run.
_ACCEPTANCE_RESULTS: dict[str, str] = {}


def record_acceptance(name: str, passed: bool) -> None:
    _ACCEPTANCE_RESULTS[name] = "PASS" if passed else "FAIL"


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when != "call" or "test_acceptance" not in str(item.fspath):
        return
    name = item.name.removeprefix("test_")
    if name not in _ACCEPTANCE_RESULTS:
        _ACCEPTANCE_RESULTS[name] = "PASS" if report.passed else "FAIL"
    elif report.failed:
        _ACCEPTANCE_RESULTS[name] = "FAIL"


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name, status in _ACCEPTANCE_RESULTS.items():
        terminalreporter.write_line(f"{status}  {name}")

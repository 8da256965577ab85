import pytest

from splitbpe.splitter import FrequencyTable

_ACCEPTANCE: list[tuple[str, bool, str]] = []


@pytest.fixture
def record():
    """Log one acceptance criterion; the lines are printed after the run."""

    def _record(name: str, passed: bool, detail: str = "") -> bool:
        _ACCEPTANCE.append((name, bool(passed), detail))
        return passed

    return _record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}  {detail}")


@pytest.fixture
def http_table():
    return FrequencyTable({"http": 10, "request": 10})

import pytest

_ACCEPTANCE: list[tuple[str, bool, str]] = []


@pytest.fixture
def acceptance():
    """Record one acceptance criterion outcome for the end-of-run summary."""

    def record(name: str, passed: bool, detail: str = "") -> None:
        _ACCEPTANCE.append((name, passed, detail))
        print(f"[{'PASS' if passed else 'FAIL'}] {name} {detail}")

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}  {detail}")

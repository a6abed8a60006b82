import pytest

_ACCEPTANCE = []


@pytest.fixture
def record():
    """Log one acceptance line; the line is printed in the terminal summary."""

    def _record(criterion: str, ok: bool, detail: str):
        _ACCEPTANCE.append(f"[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}")
        return ok

    return _record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)

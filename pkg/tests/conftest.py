import pytest

ACCEPTANCE_LINES = {}


def record(criterion, ok, message):
    line = f"criterion {criterion:>2}: {'PASS' if ok else 'FAIL'}  {message}"
    ACCEPTANCE_LINES[criterion] = line
    print(line)


@pytest.fixture
def acceptance_record():
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])

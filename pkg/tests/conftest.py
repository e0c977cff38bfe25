import pytest

_acceptance_lines = []


@pytest.fixture
def acceptance(request):
    """Record a one-line verdict for an acceptance criterion, then assert it."""

    def record(ok: bool, detail: str):
        name = request.node.name.removeprefix("test_")
        _acceptance_lines.append(
            f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
        assert ok, detail

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _acceptance_lines:
        terminalreporter.write_line("")
        terminalreporter.write_line("acceptance criteria:")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)

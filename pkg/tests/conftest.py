import pytest

_LINES = []


@pytest.fixture
def criterion():
    """record(number, ok, detail) prints and keeps one verdict line per criterion."""
    def record(number, ok, detail, warn=False):
        verdict = "PASS" if ok else "FAIL"
        if ok and warn:
            verdict = "PASS (warn)"
        line = f"criterion {number:2d}: {verdict}  {detail}"
        _LINES.append((number, line))
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for _, line in sorted(_LINES):
        terminalreporter.write_line(line)

"""Collects acceptance verdicts and prints one line per criterion at the end of the run."""
import pytest

_VERDICTS = {}


@pytest.fixture
def verdict():
    """Call ``verdict(n, ok, detail)`` to record the outcome of acceptance criterion n."""

    def record(n, ok, detail=""):
        _VERDICTS[n] = (bool(ok), detail)
        line = f"ACCEPTANCE {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_VERDICTS):
        ok, detail = _VERDICTS[n]
        terminalreporter.write_line(f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}")

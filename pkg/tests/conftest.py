import contextlib

import pytest

_ACCEPTANCE = []


@pytest.fixture
def criterion():
    """Record one pass/fail line per acceptance criterion."""

    @contextlib.contextmanager
    def record(label, detail=""):
        info = {"detail": detail}
        try:
            yield info
        except BaseException:
            _ACCEPTANCE.append(("FAIL", label, info["detail"]))
            raise
        _ACCEPTANCE.append(("PASS", label, info["detail"]))

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for status, label, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"[{status}] {label}" + (f" -- {detail}" if detail else ""))

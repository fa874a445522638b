import contextlib
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

ACCEPTANCE = []


@pytest.fixture
def criterion():
    """Record one acceptance criterion's outcome for the terminal summary."""

    @contextlib.contextmanager
    def record(label):
        try:
            yield
        except BaseException:
            ACCEPTANCE.append((label, False))
            raise
        ACCEPTANCE.append((label, True))

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok in ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {label}")

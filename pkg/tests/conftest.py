import pytest

from . import _criteria


def pytest_terminal_summary(terminalreporter):
    if not _criteria.LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(_criteria.LINES):
        terminalreporter.write_line(line)

"""Prints the acceptance-criteria report after the run.

tests/test_acceptance.py appends one line per criterion via
_acceptance_report.record; the hook below repeats them so `pytest -v`
output ends with a compact pass/fail table.
"""

from _acceptance_report import ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)

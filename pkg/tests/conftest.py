"""Shared test helpers: packaged fixture access and the acceptance summary.

The acceptance tests append one "[PASS] criterion N: ..." line each to
``acceptance_lines``; the terminal-summary hook prints them in a dedicated
section so a plain ``pytest -v`` run shows the per-criterion verdicts.
"""

from importlib import resources

acceptance_lines = []


def fixture_text(name):
    return resources.files("mpst").joinpath("fixtures", name).read_text()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if acceptance_lines:
        terminalreporter.write_sep("-", "acceptance criteria")
        for line in acceptance_lines:
            terminalreporter.write_line(line)

"""Shared fixtures and helpers for the test suite."""

from __future__ import annotations

import json

import pytest

from cantorlab import get_set


@pytest.fixture(scope="session")
def ternary():
    return get_set("ternary")


@pytest.fixture(scope="session")
def middle_fifth():
    return get_set("middle-fifth")


@pytest.fixture(scope="session")
def thin_pair_set():
    return get_set("thin")


@pytest.fixture(scope="session")
def thick_pair_set():
    return get_set("thick")


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def run_cli(argv, capsys):
    """Run the command-line entry point in-process.

    Returns (exit_code, parsed_record_or_None, raw_stdout, raw_stderr).
    """
    from cantorlab.cli import main

    code = main(list(argv))
    captured = capsys.readouterr()
    record = None
    if captured.out.strip().startswith("{"):
        record = json.loads(captured.out)
    return code, record, captured.out, captured.err

import json
from pathlib import Path

import pytest

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def erlang_r_tables():
    """Reference rows of the Erlang-R blocking and holding tables."""
    with open(DATA / "erlang_r_tables.json", encoding="utf-8") as fh:
        return json.load(fh)


# Outcome lines of the acceptance criteria, filled in by test_acceptance.py.
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[number])

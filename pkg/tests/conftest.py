import sys
from pathlib import Path

import pytest

from bdi_explain import data_file, load_trace, load_tree

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture(scope="session")
def coffee():
    return load_tree(data_file("coffee.json"))


@pytest.fixture(scope="session")
def coffee_trace():
    return load_trace(data_file("coffee_trace.json"))



# Acceptance verdicts, filled in by test_acceptance.py and echoed at the end of the run.
ACCEPTANCE_RESULTS: dict[str, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_RESULTS.values():
            terminalreporter.write_line(line)

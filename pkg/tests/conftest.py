import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from resonance.ntcore import prime_context


@pytest.fixture(scope="session")
def ctx13():
    return prime_context(13)


@pytest.fixture(scope="session")
def ctx101():
    return prime_context(101)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

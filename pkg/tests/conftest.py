import math

import pytest

from merminlab.mermin import canonical_operator

PHIS_8 = [k * math.pi / 4 for k in range(8)]


@pytest.fixture(scope="session")
def pairs():
    return {n: canonical_operator(n) for n in range(2, 8)}


# verdict lines collected by test_acceptance.py, shown after the run
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])

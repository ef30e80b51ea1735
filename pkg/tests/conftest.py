import pytest

from basilica.automata import basilica
from basilica.elements import table_for

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def G():
    return basilica()


@pytest.fixture(scope="session")
def T(G):
    t = table_for(G)
    t.extend_ball(6)
    return t


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

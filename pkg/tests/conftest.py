import pytest

from pgkneser.analysis import Context
from pgkneser.geometry import ProjectiveSpace
from pgkneser.kneser import build_graph


@pytest.fixture(scope="session")
def pg4_2():
    return ProjectiveSpace(4, 2)


@pytest.fixture(scope="session")
def pg4_3():
    return ProjectiveSpace(4, 3)


@pytest.fixture(scope="session")
def chambers2(pg4_2):
    return build_graph(pg4_2, "chambers")


@pytest.fixture(scope="session")
def coflags2(pg4_2):
    return build_graph(pg4_2, "coflags")


@pytest.fixture(scope="session")
def ctx2(pg4_2, chambers2, coflags2):
    return Context(pg4_2, chambers=chambers2, coflags=coflags2)


@pytest.fixture(scope="session")
def ctx3(pg4_3):
    return Context(pg4_3)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

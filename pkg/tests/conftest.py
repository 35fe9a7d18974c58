import pytest

from spp_sim.graphene import Emitter, GrapheneModel


@pytest.fixture
def model():
    return GrapheneModel(0.5, 0.5)


@pytest.fixture
def emitter():
    return Emitter(0.5, 1e8, 10.0)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)

import pytest

from lambdaquad.catalog import get_problem
from lambdaquad.commute import construct
from lambdaquad.expr import Box, parse

PG27_BOX = Box({"x": (0.0, 1.0), "u": (0.5, 2.0), "ux": (-2.0, 2.0)}, (parse("u"),))


@pytest.fixture(scope="session")
def box():
    return PG27_BOX


@pytest.fixture(scope="session")
def problems():
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = get_problem(name)
        return cache[name]

    return get


@pytest.fixture(scope="session")
def commuting(problems):
    cache = {}

    def get(name):
        if name not in cache:
            P = problems(name)
            cache[name] = construct(P.phi, P.lambda1, P.lambda2, P.f1, P.f2, P.g1, P.g2)
        return cache[name]

    return get


def pytest_terminal_summary(terminalreporter, config):
    from test_acceptance import ACCEPTANCE_LINES

    lines = config.stash.get(ACCEPTANCE_LINES, {})
    if lines:
        terminalreporter.section("acceptance criteria")
        for n in sorted(lines):
            terminalreporter.write_line(lines[n])

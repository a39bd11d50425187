import sys
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

from fsfw.graphs import K2, WeightedGraph, build_ball, build_perfect_tree, complete_graph, cycle_graph, product

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def triangle():
    return complete_graph(3)


@pytest.fixture
def square():
    return cycle_graph(4)


def perfect_product(d, n, w):
    return product(build_perfect_tree(d, n), K2, Fraction(w))


def ball_product(d, n, w):
    return product(build_ball(d, n), K2, Fraction(w))


def star(weights):
    """Center 0 joined to leaves 1..k with the given conductances."""
    return WeightedGraph(len(weights) + 1, [(0, i + 1, wt) for i, wt in enumerate(weights)])


def pytest_terminal_summary(terminalreporter):
    module = next((m for name, m in list(sys.modules.items()) if name.endswith("test_acceptance")), None)
    results = getattr(module, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for result in results:
            terminalreporter.write_line(result.line())

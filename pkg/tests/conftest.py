import sys

import pytest

from ineq_forge.manifold import builtin_manifold


@pytest.fixture(scope="session")
def h3():
    return builtin_manifold("hyperbolic", 3)


@pytest.fixture(scope="session")
def r3():
    return builtin_manifold("euclidean", 3)


@pytest.fixture(scope="session")
def bad_model():
    return builtin_manifold("counterexample", 3)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    RESULTS = module.RESULTS
    terminalreporter.section("acceptance criteria")
    for number in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[number])

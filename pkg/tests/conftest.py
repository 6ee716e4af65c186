import pytest
from hypothesis import HealthCheck, settings

from astar_knapsack.knapsack import KnapsackInstance

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture
def tiny():
    # p = w = (2, 3, 4), C = 5
    return KnapsackInstance((2, 3, 4), (2, 3, 4), 5)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])

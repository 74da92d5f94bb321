import pytest

from helpers import ACCEPTANCE_LINES, CHAOS_NOMINAL, CHAOS_VERIFIED, LIMIT_CYCLE, QUASI_PERIODIC, run_point


@pytest.fixture(scope="session")
def limit_cycle_run():
    return run_point(*LIMIT_CYCLE)


@pytest.fixture(scope="session")
def quasi_periodic_run():
    return run_point(*QUASI_PERIODIC)


@pytest.fixture(scope="session")
def chaos_run():
    return run_point(*CHAOS_VERIFIED)


@pytest.fixture(scope="session")
def nominal_chaos_run():
    return run_point(*CHAOS_NOMINAL)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

import pytest

from rcdirichlet.forms import delta, eisenstein

N_DEFAULT = 50


@pytest.fixture(scope="session")
def E4():
    return eisenstein(4, N_DEFAULT)


@pytest.fixture(scope="session")
def E6():
    return eisenstein(6, N_DEFAULT)


@pytest.fixture(scope="session")
def E2():
    return eisenstein(2, N_DEFAULT)


@pytest.fixture(scope="session")
def Delta():
    return delta(N_DEFAULT)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)

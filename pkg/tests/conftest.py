import pytest

from qmvpower import dataio, reproduce


@pytest.fixture(scope="session")
def eu28():
    return dataio.builtin_dataset("eu28")


@pytest.fixture(scope="session")
def eu27():
    return dataio.builtin_dataset("eu27_postbrexit")


@pytest.fixture(scope="session")
def precroatia():
    return dataio.builtin_dataset("eu27_precroatia")


@pytest.fixture(scope="session")
def eec():
    return dataio.builtin_dataset("eec1958")


@pytest.fixture(scope="session")
def profile_matrices():
    """The three published change matrices under their reproduction profiles."""
    return {name: reproduce.PROFILES[name].matrix() for name in reproduce.MATRIX_PROFILES}


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for number in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[number])

import pytest

from qaut.hopf import system_for
from qaut.presentations import aut_B_presentation, aut_Mn_presentation, magic_presentation


@pytest.fixture(scope="session")
def magic():
    return {n: magic_presentation(n) for n in (1, 2, 3, 4)}


@pytest.fixture(scope="session")
def magic_sys(magic):
    return {n: system_for(P) for n, P in magic.items()}


@pytest.fixture(scope="session")
def autm2():
    return aut_Mn_presentation(2)


@pytest.fixture(scope="session")
def autb12():
    return aut_B_presentation((1, 2))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS, summary_lines
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in summary_lines():
            terminalreporter.write_line(line)

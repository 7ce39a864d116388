import pytest

from fh2lab.circuit import TOFFOLI, X, general, hc1q

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def toffoli3():
    return hc1q(3, [TOFFOLI(1, 2, 3)])


@pytest.fixture
def x_then_h():
    # X on qubit 1 of two; the trailing H layer is appended by the compiler
    return general(2, [X(1)])

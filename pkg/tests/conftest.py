import pytest

from shiftspec.index_maps import Affine, Interval, Residue, affine, piecewise, square_plus, table

# filled by tests/test_acceptance.py, printed after the run
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[k])


@pytest.fixture
def cycle3():
    return table({0: 1, 1: 2, 2: 0})


@pytest.fixture
def successor():
    return affine(1, 1)


@pytest.fixture
def negation():
    return affine(-1, 0)


@pytest.fixture
def square():
    return square_plus(1)


@pytest.fixture
def mixed_parity():
    """Evens move up by two, odds are negated; injective with a 2-cycle."""
    return piecewise([(Residue(0, 2), Affine(1, 2))], Affine(-1, 0))


@pytest.fixture
def mixed_chain():
    """Fixed on the negatives, successor from 0 on."""
    return piecewise([(Interval(None, -1), Affine(1, 0))], Affine(1, 1))

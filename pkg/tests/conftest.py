import math

import pytest

from qtraj.basis import (Constant, HarmonicExcited1, HarmonicGround, Linear, Scenario,
                         build_basis)
from qtraj.constants import force_si_to_internal

G_FIG = force_si_to_internal(1e-9)


@pytest.fixture
def free10():
    sc = Scenario(Constant(0.0), 10.0)
    return sc, build_basis(sc)


@pytest.fixture
def linear10():
    sc = Scenario(Linear(G_FIG), 10.0)
    return sc, build_basis(sc)


@pytest.fixture
def ground10():
    sc = Scenario(HarmonicGround(), 10.0)
    return sc, build_basis(sc)


@pytest.fixture
def excited30():
    sc = Scenario(HarmonicExcited1(), 30.0)
    return sc, build_basis(sc)


def node_spacing_time(eps, hbar):
    return math.pi * hbar / (2 * eps)


ACCEPTANCE_LINES = {}


def record_acceptance(number, title, passed, detail):
    """Store the one-line verdict printed at the end of the run."""
    line = f"criterion {number:2d} [{'PASS' if passed else 'FAIL'}] {title}: {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])

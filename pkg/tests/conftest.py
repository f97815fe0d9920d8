"""Shared fixtures.  The expensive spectrum scans are session-scoped and
reused across the unit suites and the acceptance suite."""

import numpy as np
import pytest

from slspec import bc
from slspec.determinant import DetEvaluator
from slspec.potential import Potential
from slspec.spectrum import locate_spectrum


@pytest.fixture(scope="session")
def q_zero():
    return Potential.zero()


@pytest.fixture(scope="session")
def q_x():
    return Potential.from_poly([0.0, 1.0])


@pytest.fixture(scope="session")
def q_sin():
    return Potential.from_callable(np.sin, 129)


@pytest.fixture(scope="session")
def dirichlet_report(q_zero):
    ev = DetEvaluator(q_zero, bc.dirichlet())
    return locate_spectrum(ev, (0.0, 20.6, -0.8, 0.8))


@pytest.fixture(scope="session")
def neumann_report(q_zero):
    ev = DetEvaluator(q_zero, bc.neumann())
    return locate_spectrum(ev, (0.0, 10.55, -0.8, 0.8))


@pytest.fixture(scope="session")
def periodic_report(q_zero):
    ev = DetEvaluator(q_zero, bc.periodic())
    return locate_spectrum(ev, (0.0, 17.3, -0.6, 0.6))


@pytest.fixture(scope="session")
def antiperiodic_report(q_zero):
    ev = DetEvaluator(q_zero, bc.antiperiodic())
    return locate_spectrum(ev, (0.0, 16.2, -0.6, 0.6))


@pytest.fixture(scope="session")
def type2_report(q_zero):
    ev = DetEvaluator(q_zero, bc.type2(1.0))
    return locate_spectrum(ev, (0.0, 13.3, -1.0, 1.0))


@pytest.fixture(scope="session")
def irregular_report(q_zero):
    ev = DetEvaluator(q_zero, bc.irregular_a0(1.0))
    return locate_spectrum(ev, (0.0, 11.6, -2.2, 2.2))

import math

import pytest
from scipy.optimize import brentq

from frontlab.config import ExperimentConfig
from frontlab.harness import front_context
from frontlab.reactions import build_square_well, quadratic_ignition
from frontlab.traveling_front import solve_front


def well_eigenvalue(A, L):
    """Root of sqrt(A - lam) tan(sqrt(A - lam) L) = sqrt(lam) for the even ground state."""
    g = lambda lam: math.sqrt(A - lam) * math.tan(math.sqrt(A - lam) * L) - math.sqrt(lam)
    lo = max(0.0, A - (math.pi / 2 / L) ** 2) + 1e-15
    return brentq(g, lo, A - 1e-15, xtol=1e-15)


@pytest.fixture(scope="session")
def f0():
    return quadratic_ignition(0.25)


@pytest.fixture(scope="session")
def default_reaction(f0):
    return build_square_well(f0, 0.1, 1.0, 0.1)


@pytest.fixture(scope="session")
def default_front(f0):
    return solve_front(f0)


@pytest.fixture(scope="session")
def default_context():
    return front_context(ExperimentConfig())

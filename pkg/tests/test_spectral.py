import math

import numpy as np
import pytest
from scipy.optimize import brentq

from conftest import well_eigenvalue
from frontlab.errors import NoPositiveEigenvalue, PreconditionViolated
from frontlab.reactions import square_well_perturbation, tabulated_perturbation
from frontlab.spectral import (
    ContinuumEigenfunction,
    boosted_eigenpair,
    check_tail_bound,
    count_above,
    potential_problem,
    principal_eigenpair,
    principal_eigenvalue,
    rayleigh_quotient,
    select_boost,
)

# even ground state of the square well, from the transcendental equation
WELL_LAMBDA = {
    (1.0, 1.0): 0.45375316586032827,
    (0.5, 2.0): 0.3019489169316973,
    (2.0, 0.5): 0.615843185407225,
    (0.1, 1.0): 0.008842139071180677,
}


@pytest.mark.parametrize("A,L", sorted(WELL_LAMBDA))
def test_frozen_oracle_values(A, L):
    assert well_eigenvalue(A, L) == pytest.approx(WELL_LAMBDA[(A, L)], abs=1e-13)


@pytest.mark.parametrize("A,L", sorted(WELL_LAMBDA))
def test_square_well_eigenvalue(A, L):
    pair = principal_eigenpair(potential_problem(square_well_perturbation(A, L), h=0.01))
    assert abs(pair.lam - WELL_LAMBDA[(A, L)]) < 5 * 0.01**2
    assert pair.residual_norm < 1e-8
    assert pair.psi.values.max() == pytest.approx(1.0)
    assert np.all(pair.psi.values >= -1e-14)


def test_dirichlet_box_eigenvalue():
    A, L, M = 1.0, 1.0, 3.0

    def g(lam):
        k = math.sqrt(lam)
        return math.sqrt(A - lam) * math.tan(math.sqrt(A - lam) * L) - k / math.tanh(k * (M - L))

    exact = brentq(g, 0.3, 0.6, xtol=1e-15)
    pair = principal_eigenpair(potential_problem(square_well_perturbation(A, L), h=0.01, dirichlet=M))
    assert pair.boundary == "dirichlet"
    assert abs(pair.lam - exact) < 5e-4
    assert pair.lam < WELL_LAMBDA[(A, L)]


def test_dirichlet_free_laplacian_is_negative():
    pair = principal_eigenpair(potential_problem(square_well_perturbation(0.0, 1.0), h=0.01, dirichlet=2.0))
    assert pair.lam == pytest.approx(-(math.pi / 4) ** 2, rel=1e-4)


def test_trivial_potential_reports_zero():
    p = potential_problem(square_well_perturbation(0.0, 1.0), h=0.05)
    with pytest.raises(NoPositiveEigenvalue):
        principal_eigenpair(p)
    assert principal_eigenvalue(p) == 0.0


def test_sturm_count_matches_dense_eigenvalues():
    rng = np.random.default_rng(3)
    diag = rng.normal(size=40)
    off = 0.7
    T = np.diag(diag) + off * (np.eye(40, k=1) + np.eye(40, k=-1))
    ev = np.linalg.eigvalsh(T)
    for sigma in (-2.0, 0.0, 0.3, 1.5):
        assert count_above(diag, off, sigma) == int(np.sum(ev > sigma))


def test_rayleigh_quotient_close_to_eigenvalue():
    a = square_well_perturbation(1.0, 1.0)
    pair = principal_eigenpair(potential_problem(a, h=0.01))
    assert rayleigh_quotient(pair.psi, a) == pytest.approx(pair.lam, abs=1e-3)


def test_boost_raises_eigenvalue_to_shifted_well():
    a = square_well_perturbation(0.1, 1.0)
    pair = boosted_eigenpair(a, 0.1, h=0.01)
    assert pair.lam == pytest.approx(well_eigenvalue(0.3, 1.0), abs=5e-4)


def test_select_boost_lands_in_window(default_front):
    a = square_well_perturbation(0.1, 1.0)
    c0 = default_front.speed
    eps, pair = select_boost(a, c0)
    assert eps > 0
    assert c0**2 / 16 < pair.lam < c0**2


def test_select_boost_refuses_supercritical(default_front):
    with pytest.raises(PreconditionViolated):
        select_boost(square_well_perturbation(2.0, 1.0), default_front.speed)


def test_tail_bound_holds_for_boosted_pair():
    a = square_well_perturbation(0.5, 1.0)
    assert check_tail_bound(boosted_eigenpair(a, 0.1), 1.0).passed


def test_tail_bound_detects_wrong_support():
    pair = principal_eigenpair(potential_problem(square_well_perturbation(1.0, 1.0), h=0.01))
    # pretending the support is narrower makes the bound false near the well
    assert not check_tail_bound(pair, 0.2).passed


def test_continuum_eigenfunction_solves_ode():
    a = square_well_perturbation(1.0, 1.0)
    psi = ContinuumEigenfunction(principal_eigenpair(potential_problem(a, h=0.02)))
    assert psi.lam == pytest.approx(WELL_LAMBDA[(1.0, 1.0)], abs=1e-10)
    x = np.array([-4.0, -2.0, -0.5, 0.3, 1.5, 6.0])
    h = 1e-4
    second = (psi(x + h) - 2 * psi(x) + psi(x - h)) / h**2
    np.testing.assert_allclose(second, psi.second_derivative(x), atol=1e-5)
    assert psi(0.0) == pytest.approx(1.0)
    k = math.sqrt(1.0 - psi.lam)
    assert psi(5.0) == pytest.approx(math.cos(k) * math.exp(-psi.rate * 4.0), rel=1e-6)


def test_continuum_infimum_on_support():
    a = square_well_perturbation(1.0, 1.0)
    psi = ContinuumEigenfunction(principal_eigenpair(potential_problem(a, h=0.02)))
    assert psi.infimum(-1.0, 1.0) == pytest.approx(math.cos(math.sqrt(1 - psi.lam)), rel=1e-6)


def test_tabulated_potential_runs():
    a = tabulated_perturbation([-1.0, 0.0, 1.0], [0.0, 1.0, 0.0])
    pair = principal_eigenpair(potential_problem(a, h=0.02))
    assert 0 < pair.lam < 1.0


def test_sturm_count_on_discrete_laplacian():
    # eigenvalues -(4/h^2) sin^2(k pi / (2 (n + 1))), k = 1..n
    n, h = 99, 0.1
    off = 1.0 / h**2
    diag = np.full(n, -2.0 * off)
    ev = -(4.0 / h**2) * np.sin(np.arange(1, n + 1) * np.pi / (2 * (n + 1))) ** 2
    for sigma in (ev[0] - 1e-6, ev[0] + 1e-6, 0.5 * (ev[2] + ev[3])):
        assert count_above(diag, off, sigma) == int(np.sum(ev > sigma))

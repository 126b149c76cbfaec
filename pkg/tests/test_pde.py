import math

import numpy as np
import pytest

from frontlab.errors import InsufficientSupport, WindowTooShort
from frontlab.grid import GridFunction
from frontlab.harness import grid_front_speed
from frontlab.pde import (
    CauchyProblem,
    Dirichlet,
    NeumannZero,
    Trajectory,
    bump_fit,
    entire_bump_state,
    front_positions,
    global_mean_speed,
    run_cauchy,
    step,
)
from frontlab.reactions import build_square_well
from frontlab.spectral import potential_problem, principal_eigenpair


def heat_kernel(t, x, s0=1.0, amp=0.2):
    s2 = s0 * s0 + 2 * t
    return amp * s0 / math.sqrt(s2) * np.exp(-x * x / (2 * s2))


@pytest.fixture(scope="module")
def inert(f0):
    # amplitude 0 and data below the ignition threshold: pure diffusion
    return build_square_well(f0, 0.0, 1.0, 0.1)


@pytest.mark.parametrize("scheme,dt", [("imex-cn", 0.01), ("explicit", 0.001)])
def test_heat_kernel(inert, scheme, dt):
    h = 0.05
    init = GridFunction.sample(lambda x: heat_kernel(0.0, x), -20, 20, h)
    p = CauchyProblem(inert, init, dt, Dirichlet(0.0), Dirichlet(0.0), scheme=scheme)
    tr = run_cauchy(p, 2.0, 100, (0.1,))
    err = np.max(np.abs(tr.snapshots[-1].values - heat_kernel(2.0, init.x)))
    assert err < 2e-5


def test_heat_kernel_second_order(inert):
    errs = []
    for h in (0.1, 0.05):
        init = GridFunction.sample(lambda x: heat_kernel(0.0, x), -20, 20, h)
        p = CauchyProblem(inert, init, h / 5, Dirichlet(0.0), Dirichlet(0.0))
        tr = run_cauchy(p, 1.0, 1000, (0.1,))
        errs.append(np.max(np.abs(tr.snapshots[-1].values - heat_kernel(1.0, init.x))))
    assert 3.0 < errs[0] / errs[1] < 5.0


def test_neumann_conserves_mass(inert):
    init = GridFunction.sample(lambda x: heat_kernel(0.0, x - 8.0), -12, 12, 0.05)
    p = CauchyProblem(inert, init, 0.01, NeumannZero(), NeumannZero())
    tr = run_cauchy(p, 20.0, 200, (0.1,))
    assert tr.mass[-1] == pytest.approx(tr.mass[0], rel=1e-10)


def test_time_dependent_dirichlet(inert):
    init = GridFunction.sample(lambda x: 0.0 * x, -12, 12, 0.05)
    p = CauchyProblem(inert, init, 0.01, Dirichlet(lambda t: 0.1 * min(t, 1.0)), Dirichlet(0.0))
    out = step(step(init, p, 0.0), p, 0.01)
    assert out.values[0] == pytest.approx(0.002)


def test_validation(default_reaction):
    small = GridFunction.sample(lambda x: 0 * x, -5, 5, 0.05)
    with pytest.raises(ValueError):
        CauchyProblem(default_reaction, small, 0.01)
    big = GridFunction.sample(lambda x: 0 * x, -20, 20, 0.05)
    with pytest.raises(ValueError):
        CauchyProblem(default_reaction, big, 0.01, scheme="explicit")
    with pytest.raises(ValueError):
        CauchyProblem(default_reaction, big, -0.01)


@pytest.mark.filterwarnings("ignore::frontlab.errors.DomainBreach")
def test_values_stay_in_unit_interval(default_reaction):
    rng = np.random.default_rng(1)
    init = GridFunction(-20.0, 0.05, rng.uniform(0, 1, 801))
    p = CauchyProblem(default_reaction, init, 0.05, Dirichlet(1.0), Dirichlet(0.0))
    tr = run_cauchy(p, 2.0, 5, (0.1,))
    for s in tr.snapshots:
        assert s.values.min() >= 0.0 and s.values.max() <= 1.0


def test_grid_front_speed_close_to_c0(default_front):
    ch = grid_front_speed(default_front, 0.05, 0.01, t_run=40.0)
    assert abs(ch / default_front.speed - 1) < 1e-4


def test_front_positions_on_profile(default_front):
    tf = default_front
    g = GridFunction.sample(tf, -40, 40, 0.01)
    fp = front_positions(g, 0.1)
    assert fp.minus_attained and fp.plus_attained
    assert fp.x_minus == pytest.approx(tf.inverse(0.9), abs=1e-4)
    assert fp.x_plus == pytest.approx(tf.inverse(0.1), abs=1e-4)
    assert fp.width == pytest.approx(tf.width(0.1), abs=2e-4)


def test_front_positions_not_attained():
    g = GridFunction(-1.0, 0.5, np.array([0.0, 0.0, 0.0, 0.0, 0.0]))
    fp = front_positions(g, 0.1)
    assert not fp.plus_attained and not fp.minus_attained


def test_global_mean_speed_linear():
    t = np.linspace(0, 40, 401)
    X = 0.5 * t + 0.01 * np.sin(t)
    tr = Trajectory(t, [], (), {}, {}, X, np.array([]), np.array([]), 0.05, 0.1)
    est = global_mean_speed(tr, 5.0)
    assert est.speed == pytest.approx(0.5, abs=2e-3)
    with pytest.raises(WindowTooShort):
        global_mean_speed(tr, 15.0)


def test_bump_fit_exact_exponential():
    g = GridFunction.sample(lambda x: 3.0 * np.exp(-0.7 * np.abs(x)), -30, 30, 0.05)
    fit = bump_fit(g, 2.0)
    assert fit.c == pytest.approx(0.7, rel=1e-10)
    assert fit.C == pytest.approx(3.0, rel=1e-8)
    assert fit.bump_like
    with pytest.raises(InsufficientSupport):
        bump_fit(g, 29.9)


def test_bump_fit_rejects_front(default_front):
    g = GridFunction.sample(default_front, -30, 30, 0.05)
    assert not bump_fit(g, 2.0).bump_like


def test_entire_bump_state_is_linear_solution(f0):
    r = build_square_well(f0, 1.3, 1.0, 0.1)
    pair = principal_eigenpair(potential_problem(r.perturbation, h=0.05, truncation_radius=31.0))
    init = entire_bump_state(pair, 0.1, -2.0)
    p = CauchyProblem(r, init, 0.01, Dirichlet(0.0), Dirichlet(0.0), t0=-2.0)
    tr = run_cauchy(p, 0.0, 50, (0.5,))
    exact = entire_bump_state(pair, 0.1, 0.0).values
    assert np.max(np.abs(tr.snapshots[-1].values - exact)) / exact.max() < 1e-3
    with pytest.raises(ValueError):
        entire_bump_state(pair, 0.1, 1.0)


def test_run_ends_exactly_at_t_end(inert):
    init = GridFunction.sample(lambda x: heat_kernel(0.0, x), -20, 20, 0.05)
    tr = run_cauchy(CauchyProblem(inert, init, 0.01, Dirichlet(0.0), Dirichlet(0.0)), 1.2345, 7, (0.1,))
    assert tr.times[-1] == pytest.approx(1.2345, abs=1e-12)
    assert tr.dt <= 0.01

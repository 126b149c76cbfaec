import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from frontlab.errors import BracketFailure
from frontlab.reactions import quadratic_ignition, step_ignition
from frontlab.traveling_front import (
    FrontSolveSettings,
    select_delta,
    solve_front,
    solve_perturbed_front,
)


def phase_plane_speed(theta):
    """Speed of the quadratic ignition front from V(U) dV/dU = -cV - f(U) integrated in U."""

    def mismatch(c):
        m = (-c + math.sqrt(c * c + 4 * (1 - theta))) / 2
        s = 1e-7

        def rhs(U, V):
            return [(-c * V[0] - (U - theta) * (1 - U)) / V[0]]

        sol = solve_ivp(rhs, (1 - s, theta), [-m * s], method="Radau", rtol=1e-12, atol=1e-15)
        return sol.y[0, -1] + c * theta

    return brentq(mismatch, 0.1, 2.0, xtol=1e-14)


def step_delta_speed(theta, delta):
    """Front speed for the widened step reaction: exponential pieces matched at theta -/+ delta."""
    p = 1 - theta

    def mismatch(c):
        mu = (-c + math.sqrt(c * c + 4)) / 2
        d = (mu * p - p / c) / c
        b = theta + delta - d
        U = lambda y: b + d * math.exp(-c * y) - p * y / c
        dU = lambda y: -c * d * math.exp(-c * y) - p / c
        hi = 1.0
        while U(hi) > theta - delta:
            hi *= 2
        y1 = brentq(lambda y: U(y) - (theta - delta), 0, hi, xtol=1e-15)
        return dU(y1) + c * (theta - delta)

    return brentq(mismatch, 0.05, 20, xtol=1e-14)


QUADRATIC_SPEED = {0.16: 0.7620810317577112, 0.25: 0.5766995002001545, 0.36: 0.41154724506968704}
STEP_DELTA_SPEED = {0.05: 1.8207538211879075, 0.1: 2.1941714841593836, 0.2: 3.8729471912794944}


@pytest.mark.parametrize("theta", sorted(QUADRATIC_SPEED))
def test_phase_plane_oracle_frozen(theta):
    assert phase_plane_speed(theta) == pytest.approx(QUADRATIC_SPEED[theta], abs=1e-10)


@pytest.mark.parametrize("delta", sorted(STEP_DELTA_SPEED))
def test_step_delta_oracle_frozen(delta):
    assert step_delta_speed(0.25, delta) == pytest.approx(STEP_DELTA_SPEED[delta], abs=1e-10)


@pytest.mark.parametrize("theta", sorted(QUADRATIC_SPEED))
def test_quadratic_speed(theta):
    assert solve_front(quadratic_ignition(theta)).speed == pytest.approx(QUADRATIC_SPEED[theta], abs=1e-8)


@pytest.mark.parametrize("delta", sorted(STEP_DELTA_SPEED))
def test_step_delta_speed(delta):
    tf = solve_perturbed_front(step_ignition(0.25), delta)
    assert tf.speed == pytest.approx(STEP_DELTA_SPEED[delta], abs=1e-7)


def test_profile_normalisation_and_limits(default_front):
    tf = default_front
    assert tf(0.0) == pytest.approx(0.125, abs=1e-10)
    assert tf(-60.0) == pytest.approx(1.0, abs=1e-8)
    assert tf(60.0) < 1e-12
    y = np.linspace(-30, 30, 3001)
    assert np.all(np.diff(tf(y)) < 0)
    assert np.all(tf.derivative(y) < 0)


def test_profile_satisfies_ode(default_front):
    tf, f0 = default_front, default_front.reaction
    y = np.linspace(-25, 25, 1001)
    res = tf.second_derivative(y) + tf.speed * tf.derivative(y) + f0(tf(y))
    assert np.max(np.abs(res)) < 1e-6
    assert tf.residual < 1e-5


def test_exponential_tail(default_front):
    tf = default_front
    y = np.array([5.0, 10.0, 20.0])
    np.testing.assert_allclose(tf(y), 0.125 * np.exp(-tf.speed * y), rtol=1e-9)


def test_inverse_and_width(default_front):
    tf = default_front
    for v in (0.1, 0.5, 0.9):
        assert tf(tf.inverse(v)) == pytest.approx(v, abs=1e-10)
    assert tf.width(0.1) == pytest.approx(tf.inverse(0.1) - tf.inverse(0.9))
    assert tf.width(0.45) < tf.width(0.25) < tf.width(0.1)


def test_translated(default_front):
    tf = default_front
    moved = tf.translated(3.0)
    assert moved(3.0) == pytest.approx(tf(0.0))


def test_final_bracket_contains_speed(default_front):
    lo, hi = default_front.bracket
    assert lo <= default_front.speed <= hi
    assert hi - lo <= 2 * FrontSolveSettings().speed_tol + 1e-15


def test_nested_speeds_under_shrinking_tolerance(f0):
    coarse = solve_front(f0, FrontSolveSettings(speed_tol=1e-5))
    fine = solve_front(f0, FrontSolveSettings(speed_tol=1e-9))
    assert coarse.bracket[0] - 1e-12 <= fine.speed <= coarse.bracket[1] + 1e-12


def test_bad_bracket_raises(f0):
    with pytest.raises(BracketFailure):
        solve_front(f0, FrontSolveSettings(speed_bracket=(0.7, 0.9)))


def test_perturbed_speed_increases(f0):
    speeds = [solve_perturbed_front(f0, d).speed for d in (0.05, 0.1, 0.2)]
    assert QUADRATIC_SPEED[0.25] < speeds[0] < speeds[1] < speeds[2]


def test_select_delta(f0):
    c0 = QUADRATIC_SPEED[0.25]
    delta, c_delta = select_delta(f0, 1.0, (0.05, 0.1, 0.2), c0=c0)
    assert delta == 0.1
    assert c_delta <= math.sqrt(c0 * 1.0)
    assert select_delta(f0, 0.6, (0.1, 0.2), c0=c0) == (None, None)

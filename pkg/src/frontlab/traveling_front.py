"""Spreading speed and profile of a homogeneous ignition front by shooting.

The profile solves ``U'' + c U' + f0(U) = 0`` with ``U(-inf) = top`` and
``U(+inf) = 0``.  Below the threshold ``theta`` the equation is linear, so the
only decaying continuation from ``(theta, V)`` is ``theta*exp(-c (y - y_theta))``,
which needs ``V = -c*theta``.  The shooter leaves the unstable manifold of
``(top, 0)`` and brackets ``c`` by the sign of ``V + c*theta`` at the
threshold crossing (a trajectory that turns back above ``theta`` counts as
"speed too large"), then refines with Brent's method.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import optimize
from scipy.integrate import solve_ivp
from scipy.interpolate import BPoly

from .errors import BracketFailure, RootNotBracketed, StiffnessFailure
from .reactions import IgnitionReaction, perturb_ignition


@dataclass(frozen=True)
class FrontSolveSettings:
    speed_bracket: tuple | None = None
    speed_tol: float = 1e-10
    ode_step: float = 0.01
    y_left: float | None = None
    start_offset: float = 1e-8
    rtol: float = 1e-12
    atol: float = 1e-14
    max_length: float = 5000.0

    def __post_init__(self):
        if self.speed_bracket is not None and not self.speed_bracket[0] < self.speed_bracket[1]:
            raise ValueError("speed bracket must satisfy c_lo < c_hi")
        if min(self.speed_tol, self.ode_step, self.start_offset, self.rtol, self.atol) <= 0:
            raise ValueError("tolerances and steps must be positive")


@dataclass
class _Shot:
    kind: str  # "cross", "turn" or "stall"
    mismatch: float
    segments: list
    events: list  # (y, U, V) at restart points and the final event
    y_end: float


def _left_rate(f0: IgnitionReaction, c: float) -> float:
    s = f0.decay_slope()
    return 0.5 * (-c + math.sqrt(c * c + 4.0 * s)) if s > 0 else 0.0


def _shoot(f0: IgnitionReaction, c: float, s: FrontSolveSettings, dense: bool = False) -> _Shot:
    theta, top = f0.theta0, f0.top
    eps0 = s.start_offset * top
    mu = _left_rate(f0, c)
    u_start = top - eps0
    v_start = -mu * eps0 if mu > 0 else -float(f0(u_start)) / c
    state = np.array([u_start, v_start])
    y = 0.0

    def rhs(_, z):
        return [z[1], -c * z[1] - float(f0(z[0]))]

    def cross(_, z):
        return z[0] - theta

    cross.terminal, cross.direction = True, -1

    def turn(_, z):
        return z[1]

    turn.terminal, turn.direction = True, 1

    pending = sorted((k for k in f0.kinks if theta < k < u_start), reverse=True)
    segments, events = [], [(0.0, u_start, v_start)]
    while True:
        evs = [cross, turn]
        kink = pending[0] if pending else None
        if kink is not None:
            def at_kink(_, z, k=kink):
                return z[0] - k

            at_kink.terminal, at_kink.direction = True, -1
            evs.append(at_kink)
        sol = solve_ivp(rhs, (y, s.max_length), state, method="DOP853", rtol=s.rtol, atol=s.atol,
                        events=evs, dense_output=dense)
        if sol.status == -1:
            raise StiffnessFailure(f"integrator failed at c={c:.12g}: {sol.message}")
        segments.append((y, sol.t[-1], sol.sol))
        y = float(sol.t[-1])
        state = sol.y[:, -1].copy()
        if sol.status == 0:
            return _Shot("stall", c * theta, segments, events, y)
        if sol.t_events[0].size:
            u, v = sol.y_events[0][0]
            events.append((y, theta, v))
            return _Shot("cross", v + c * theta, segments, events, y)
        if sol.t_events[1].size:
            u, v = sol.y_events[1][0]
            return _Shot("turn", c * theta + (u - theta), segments, events, y)
        events.append((y, kink, state[1]))
        state[0] = kink
        pending.pop(0)


def _default_bracket(f0: IgnitionReaction, s: FrontSolveSettings):
    u = np.linspace(f0.theta0, f0.top, 2001)[1:-1]
    ratio = float(np.max(f0(u) / u))
    hi = 2.0 * math.sqrt(ratio) * 1.01 + 1e-6
    for _ in range(60):
        if _shoot(f0, hi, s).mismatch > 0:
            break
        hi *= 2.0
    else:
        raise BracketFailure("could not find a speed that is too large")
    lo = 1e-3 * hi
    for _ in range(60):
        if _shoot(f0, lo, s).mismatch < 0:
            break
        lo *= 0.5
    else:
        raise BracketFailure("could not find a speed that is too small")
    return lo, hi


class TravelingFront:
    """Monotone front profile with analytic tails.

    On ``[y_left, y_cross]`` the profile is a C^2 quintic Hermite interpolant
    through the shooter's samples of ``(U, U', U'')``; for ``y >= y_cross`` it is
    exactly ``theta*exp(-speed (y - y_cross))``; left of ``y_left`` it relaxes to
    ``top`` at the unstable-manifold rate ``mu_left``.  Normalised fronts have
    ``U(0) = theta/2``.
    """

    def __init__(self, reaction, speed, knots, U, V, A, y_cross, mu_left, bracket, residual, ode_step):
        self.reaction = reaction
        self.speed = float(speed)
        self.theta = reaction.theta0
        self.top = reaction.top
        self.knots = np.asarray(knots, dtype=float)
        self.U, self.V, self.A = (np.asarray(v, dtype=float) for v in (U, V, A))
        self.y_cross = float(y_cross)
        self.mu_left = float(mu_left)
        self.bracket = tuple(bracket)
        self.residual = float(residual)
        self.ode_step = float(ode_step)
        self._poly = BPoly.from_derivatives(self.knots, np.stack([self.U, self.V, self.A], axis=1))

    # -- evaluation ---------------------------------------------------------
    @property
    def y_left(self) -> float:
        return float(self.knots[0])

    @property
    def tail_tol(self) -> float:
        return float((self.top - self.U[0]) / self.top)

    def _eval(self, y, nu):
        y = np.asarray(y, dtype=float)
        out = np.empty(y.shape)
        core = (y >= self.knots[0]) & (y <= self.y_cross)
        right = y > self.y_cross
        left = y < self.knots[0]
        if np.any(core):
            out[core] = self._poly(y[core], nu)
        if np.any(right):
            e = self.theta * np.exp(-self.speed * (y[right] - self.y_cross))
            out[right] = (-self.speed) ** nu * e
        if np.any(left):
            gap = (self.top - self.U[0]) * np.exp(self.mu_left * (y[left] - self.knots[0]))
            out[left] = self.top - gap if nu == 0 else -(self.mu_left ** nu) * gap
        return out.item() if out.ndim == 0 else out

    def __call__(self, y):
        return self._eval(y, 0)

    def derivative(self, y):
        return self._eval(y, 1)

    def second_derivative(self, y):
        return self._eval(y, 2)

    # -- geometry -----------------------------------------------------------
    def inverse(self, value: float) -> float:
        """Position where the profile takes ``value`` (monotone root-finding)."""
        if not 0.0 < value < self.top:
            raise RootNotBracketed(f"value {value} outside the profile range (0, {self.top})")
        if value <= self.theta:
            return self.y_cross + math.log(self.theta / value) / self.speed
        if value >= self.U[0]:
            if self.mu_left <= 0:
                raise RootNotBracketed("left tail does not reach this value")
            return self.y_left + math.log((self.top - value) / (self.top - self.U[0])) / self.mu_left
        return optimize.brentq(lambda y: self(y) - value, self.y_left, self.y_cross, xtol=1e-14)

    def width(self, mu: float) -> float:
        """``U^{-1}(mu) - U^{-1}(top - mu)``, the front width at level ``mu``."""
        return self.inverse(mu) - self.inverse(self.top - mu)

    def min_slope(self, lo: float, hi: float, n: int = 20001) -> float:
        """``inf{-U'(s) : U(s) in [lo, hi]}``."""
        s = np.linspace(self.inverse(hi), self.inverse(lo), n)
        return float(np.min(-self.derivative(s)))

    def curvature_scale(self) -> float:
        return float(max(np.max(np.abs(self.A)), self.speed**2 * self.theta))

    def translated(self, shift: float) -> TravelingFront:
        """Profile ``y -> U(y - shift)``."""
        return TravelingFront(self.reaction, self.speed, self.knots + shift, self.U, self.V, self.A,
                              self.y_cross + shift, self.mu_left, self.bracket, self.residual, self.ode_step)

    def normalized(self) -> TravelingFront:
        """Translate so that ``U(0) = theta/2``."""
        return self.translated(-self.inverse(0.5 * self.theta))


def eval_profile(tf: TravelingFront, y):
    return tf(y)


def _residual(f0, c, z, U, skip):
    h = z[1] - z[0]
    res = (U[2:] - 2 * U[1:-1] + U[:-2]) / h**2 + c * (U[2:] - U[:-2]) / (2 * h) + f0(U[1:-1])
    zc = z[1:-1]
    ok = np.ones(zc.size, dtype=bool)
    for p in skip:
        ok &= np.abs(zc - p) >= h
    return float(np.max(np.abs(res[ok]))) if np.any(ok) else 0.0


def solve_front(f0: IgnitionReaction, s: FrontSolveSettings | None = None) -> TravelingFront:
    """Speed ``c0`` and normalised profile ``U`` (``U(0) = theta0/2``) of ``f0``."""
    s = FrontSolveSettings() if s is None else s
    if s.speed_bracket is None:
        lo, hi = _default_bracket(f0, s)
    else:
        lo, hi = s.speed_bracket
        g_lo, g_hi = _shoot(f0, lo, s).mismatch, _shoot(f0, hi, s).mismatch
        if (g_lo < 0) == (g_hi < 0):
            raise BracketFailure(f"bracket ({lo}, {hi}) does not straddle the front speed")
    # the mismatch is continuous in c: both branches tend to c*theta where they meet
    c = optimize.brentq(lambda c: _shoot(f0, c, s).mismatch, lo, hi, xtol=s.speed_tol)
    # final bracket: a sign change of width at most 2*speed_tol around c
    b_lo, b_hi = max(lo, c - s.speed_tol), min(hi, c + s.speed_tol)
    if _shoot(f0, b_lo, s).mismatch > 0:
        b_lo = lo
    if _shoot(f0, b_hi, s).mismatch < 0:
        b_hi = hi
    bracket = (b_lo, b_hi)
    shot = _shoot(f0, c, s, dense=True)
    if shot.kind != "cross":
        c = max(lo, c - s.speed_tol)
        shot = _shoot(f0, c, s, dense=True)
    if shot.kind != "cross":
        raise BracketFailure("final trajectory does not reach the threshold")

    theta = f0.theta0
    offset = -shot.y_end - math.log(2.0) / c  # moves the crossing to -ln2/c, so U(0) = theta/2
    step = s.ode_step
    restarts = [e[0] for e in shot.events[1:]]
    z0, z_cross = offset, shot.y_end + offset
    if s.y_left is not None:
        z0 = max(z0, s.y_left)
    k0, k1 = math.ceil(z0 / step), math.floor(z_cross / step)
    grid = step * np.arange(k0, k1 + 1)
    extra = np.array([z0, z_cross] + [r + offset for r in restarts])
    z = np.union1d(grid, extra)
    keep = np.concatenate(([True], np.diff(z) > 1e-9 * step))
    z = z[keep]

    y = z - offset
    UV = np.empty((2, y.size))
    for a, b, sol in shot.segments:
        m = (y >= a - 1e-12) & (y <= b + 1e-12)
        UV[:, m] = sol(np.clip(y[m], a, b))
    UV[0, -1] = theta
    UV[1, -1] = shot.events[-1][2]
    U, V = UV
    A = -c * V - np.asarray(f0(U))
    # U'' from the side above the threshold at the crossing
    A[-1] = -c * V[-1] - float(f0.evaluator(np.array([theta]))[0])

    residual = 0.0
    if grid.size >= 3:
        on_grid = np.isin(z, grid)
        residual = _residual(f0, c, z[on_grid], U[on_grid], [z_cross] + [r + offset for r in restarts])
    return TravelingFront(f0, c, z, U, V, A, z_cross, _left_rate(f0, c), bracket, residual, step)


def solve_perturbed_front(f0: IgnitionReaction, delta: float, s: FrontSolveSettings | None = None) -> TravelingFront:
    """Front of ``f_delta = perturb_ignition(f0, delta)``, range ``[0, 1 + delta]``.

    Returned as a rightward front (``U(-inf) = 1 + delta``); the leftward front
    with limits 0 at ``-inf`` and ``1 + delta`` at ``+inf`` is ``y -> U(-y)``.
    """
    return solve_front(perturb_ignition(f0, delta), s)


def select_delta(f0: IgnitionReaction, c_target: float, deltas: Sequence[float], s: FrontSolveSettings | None = None,
                 c0: float | None = None):
    """Largest tested ``delta`` with ``c_delta <= sqrt(c0 * c_target)``.

    Returns ``(delta, c_delta)``, or ``(None, None)`` if no tested value qualifies.
    """
    if c0 is None:
        c0 = solve_front(f0, s).speed
    if c_target <= c0:
        raise ValueError("target speed must exceed c0")
    limit = math.sqrt(c0 * c_target)
    best = (None, None)
    for d in sorted(deltas):
        cd = solve_perturbed_front(f0, d, s).speed
        if cd <= limit:
            best = (d, cd)
    return best

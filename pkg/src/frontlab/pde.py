"""Time stepping for ``u_t = u_xx + f(x, u)`` on a truncated line, plus front diagnostics."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy.linalg import lapack

from .errors import DomainBreach, InsufficientSupport, LinearSolveFailure, WindowTooShort
from .grid import GridFunction

UNDERFLOW_FLOOR = 1e-14


@dataclass(frozen=True)
class Dirichlet:
    """Fixed boundary value; ``value`` may be a number or a function of time."""

    value: float | Callable[[float], float] = 0.0

    def at(self, t: float) -> float:
        return float(self.value(t)) if callable(self.value) else float(self.value)


@dataclass(frozen=True)
class NeumannZero:
    pass


@dataclass(eq=False)
class CauchyProblem:
    reaction: Callable
    initial: GridFunction
    dt: float
    bc_left: Dirichlet | NeumannZero = field(default_factory=lambda: Dirichlet(1.0))
    bc_right: Dirichlet | NeumannZero = field(default_factory=lambda: Dirichlet(0.0))
    scheme: str = "imex-cn"
    t0: float = 0.0

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.scheme not in ("imex-cn", "explicit"):
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.initial.n < 3:
            raise ValueError("need at least three grid nodes")
        if self.scheme == "explicit" and self.dt > 0.5 * self.h**2:
            raise ValueError(f"explicit scheme needs dt <= h^2/2 = {0.5 * self.h**2:g}")
        L = getattr(self.reaction, "L", None)
        if L is not None and (self.x_left > -L - 10.0 or self.x_right < L + 10.0):
            raise ValueError("domain must contain [-L - 10, L + 10]")

    @property
    def h(self) -> float:
        return self.initial.h

    @property
    def x_left(self) -> float:
        return self.initial.x0

    @property
    def x_right(self) -> float:
        return self.initial.x_right

    @property
    def x(self) -> np.ndarray:
        return self.initial.x


class _Stepper:
    """Caches the grid-dependent pieces (reaction sampling, LU factors) of a problem."""

    def __init__(self, p: CauchyProblem):
        self.p = p
        x, h = p.x, p.h
        self.x, self.h, self.dt = x, h, p.dt
        self.r = p.dt / h**2
        # Nodes whose half cell contains an x-discontinuity of f see the mean of both sides.
        breaks = np.asarray(getattr(getattr(p.reaction, "perturbation", None), "breakpoints", ()) or (), float)
        if breaks.size:
            near = np.any(np.abs(x[:, None] - breaks[None, :]) <= 0.25 * h + 1e-12 * h, axis=1)
        else:
            near = np.zeros(x.size, dtype=bool)
        self.near = near
        self.x_lo, self.x_hi = x[near] - 0.25 * h, x[near] + 0.25 * h
        parts = getattr(p.reaction, "components", None)
        if parts is not None:
            f0, a, g = parts
            a_x = np.asarray(a(x), dtype=float).copy()
            a_x[near] = 0.5 * (np.asarray(a(self.x_lo)) + np.asarray(a(self.x_hi)))
            self._split = (f0, a_x, g)
        else:
            self._split = None

        n = x.size
        self.lo = 1 if isinstance(p.bc_left, Dirichlet) else 0
        self.hi = n - 1 if isinstance(p.bc_right, Dirichlet) else n
        m = self.hi - self.lo
        if p.scheme == "imex-cn":
            half = 0.5 * self.r
            d = np.full(m, 1.0 + 2.0 * half)
            dl = np.full(m - 1, -half)
            du = np.full(m - 1, -half)
            if self.lo == 0:
                du[0] = -2.0 * half
            if self.hi == n:
                dl[-1] = -2.0 * half
            dl, d, du, du2, ipiv, info = lapack.dgttrf(dl, d, du)
            if info != 0:
                raise LinearSolveFailure(f"tridiagonal factorisation failed (info={info})")
            self.lu = (dl, d, du, du2, ipiv)

    def reaction(self, u):
        if self._split is not None:
            f0, a_x, g = self._split
            inside = (u > 0.0) & (u < 1.0)
            return np.where(inside, f0(u) + a_x * g(u), 0.0)
        f = self.p.reaction
        out = np.asarray(f(self.x, u), dtype=float)
        if np.any(self.near):
            un = u[self.near]
            out = out.copy()
            out[self.near] = 0.5 * (np.asarray(f(self.x_lo, un)) + np.asarray(f(self.x_hi, un)))
        return out

    def laplacian(self, u):
        """``h^2 * u_xx`` with ghost nodes for zero-flux boundaries (boundary rows of Dirichlet sides are 0)."""
        lap = np.zeros_like(u)
        lap[1:-1] = u[:-2] - 2.0 * u[1:-1] + u[2:]
        if isinstance(self.p.bc_left, NeumannZero):
            lap[0] = 2.0 * (u[1] - u[0])
        if isinstance(self.p.bc_right, NeumannZero):
            lap[-1] = 2.0 * (u[-2] - u[-1])
        return lap

    def _apply_bc(self, u, t):
        if isinstance(self.p.bc_left, Dirichlet):
            u[0] = self.p.bc_left.at(t)
        if isinstance(self.p.bc_right, Dirichlet):
            u[-1] = self.p.bc_right.at(t)
        return u

    def _cn_solve(self, rhs_full, t_new):
        lo, hi = self.lo, self.hi
        b = rhs_full[lo:hi].copy()
        half = 0.5 * self.r
        if lo == 1:
            b[0] += half * self.p.bc_left.at(t_new)
        if hi == self.x.size - 1:
            b[-1] += half * self.p.bc_right.at(t_new)
        sol, info = lapack.dgttrs(*self.lu, b)
        if info != 0 or not np.all(np.isfinite(sol)):
            raise LinearSolveFailure("tridiagonal solve failed")
        out = np.empty_like(rhs_full)
        out[lo:hi] = sol
        return self._apply_bc(out, t_new)

    def step(self, u, t):
        t_new = t + self.dt
        if self.p.scheme == "explicit":
            new = u + self.r * self.laplacian(u) + self.dt * self.reaction(u)
            new = self._apply_bc(new, t_new)
        else:
            base = u + 0.5 * self.r * self.laplacian(u)
            pred = self._cn_solve(base + self.dt * self.reaction(u), t_new)
            new = self._cn_solve(base + self.dt * self.reaction(0.5 * (u + pred)), t_new)
        return np.clip(new, 0.0, 1.0)


def step(state: GridFunction, p: CauchyProblem, t: float | None = None) -> GridFunction:
    """One time step from time ``t`` (default ``p.t0``)."""
    if state.n != p.initial.n or state.h != p.h or state.x0 != p.x_left:
        raise ValueError("state does not live on the problem grid")
    t = p.t0 if t is None else t
    return state.with_values(_Stepper(p).step(np.array(state.values), t))


# ---------------------------------------------------------------------------
# level sets


class FrontPositions(NamedTuple):
    x_minus: float
    x_plus: float
    width: float
    minus_attained: bool
    plus_attained: bool


def front_positions(snapshot: GridFunction, mu: float) -> FrontPositions:
    """``X- = inf{u <= 1 - mu}``, ``X+ = sup{u >= mu}`` by linear interpolation.

    A level that is not crossed inside the grid is reported at the domain edge
    with its ``*_attained`` flag cleared.
    """
    if not 0.0 < mu <= 0.5:
        raise ValueError("mu must lie in (0, 1/2]")
    u, x0, h = snapshot.values, snapshot.x0, snapshot.h
    hi_level, lo_level = 1.0 - mu, mu

    below = np.flatnonzero(u <= hi_level)
    if below.size == 0:
        xm, m_ok = snapshot.x_right, False
    elif below[0] == 0:
        xm, m_ok = x0, False
    else:
        i = below[0]
        xm = x0 + h * (i - 1 + (u[i - 1] - hi_level) / (u[i - 1] - u[i]))
        m_ok = True

    above = np.flatnonzero(u >= lo_level)
    if above.size == 0:
        xp, p_ok = x0, False
    elif above[-1] == u.size - 1:
        xp, p_ok = snapshot.x_right, False
    else:
        j = above[-1]
        xp = x0 + h * (j + (u[j] - lo_level) / (u[j] - u[j + 1]))
        p_ok = True
    return FrontPositions(float(xm), float(xp), float(xp - xm), m_ok, p_ok)


# ---------------------------------------------------------------------------
# trajectories


@dataclass
class Trajectory:
    times: np.ndarray
    snapshots: list
    mu_list: tuple
    positions: dict  # mu -> array (n_times, 3) of X-, X+, width
    attained: dict  # mu -> bool array (n_times, 2)
    level_half: np.ndarray  # X(t): last crossing of 1/2
    max_value: np.ndarray
    mass: np.ndarray
    h: float
    dt: float
    breach: bool = False

    def diagnostics_rows(self):
        header = ["t", "X"]
        for mu in self.mu_list:
            header += [f"X_minus_{mu:g}", f"X_plus_{mu:g}", f"width_{mu:g}"]
        header += ["max", "mass"]
        rows = []
        for k, t in enumerate(self.times):
            row = [t, self.level_half[k]]
            for mu in self.mu_list:
                row += list(self.positions[mu][k])
            row += [self.max_value[k], self.mass[k]]
            rows.append(row)
        return header, rows


def run_cauchy(p: CauchyProblem, t_end: float, snapshot_stride: int = 10,
               mu_list: Sequence[float] = (0.1, 0.25, 0.45), keep_snapshots: bool = True,
               breach_nodes: int = 5) -> Trajectory:
    """Advance ``p`` from ``p.t0`` to ``t_end``, recording diagnostics every ``snapshot_stride`` steps.

    The step is shrunk to ``(t_end - t0) / ceil((t_end - t0) / dt)`` so the run ends exactly at ``t_end``.
    """
    if t_end <= p.t0:
        raise ValueError("t_end must exceed the start time")
    n_steps = int(math.ceil((t_end - p.t0) / p.dt - 1e-9))
    dt = (t_end - p.t0) / n_steps
    if dt != p.dt:
        # uniform steps that land on t_end; never larger than requested
        p = replace(p, dt=dt)
    stepper = _Stepper(p)
    u = np.array(p.initial.values)
    mu_list = tuple(mu_list)
    times, snaps, maxes, masses, xhalf = [], [], [], [], []
    pos = {mu: [] for mu in mu_list}
    att = {mu: [] for mu in mu_list}
    breach = False
    edge = breach_nodes * p.h

    def record(t, u):
        nonlocal breach
        g = p.initial.with_values(u)
        times.append(t)
        if keep_snapshots:
            snaps.append(g)
        maxes.append(float(u.max()))
        masses.append(float(p.h * (u.sum() - 0.5 * (u[0] + u[-1]))))
        xhalf.append(front_positions(g, 0.5).x_plus)
        for mu in mu_list:
            fp = front_positions(g, mu)
            pos[mu].append(fp[:3])
            att[mu].append(fp[3:])
            for ok, xv in ((fp.minus_attained, fp.x_minus), (fp.plus_attained, fp.x_plus)):
                if ok and not breach and (xv - p.x_left < edge or p.x_right - xv < edge):
                    breach = True
                    warnings.warn(f"level {mu} within {breach_nodes} nodes of the boundary at t={t:g}", DomainBreach)

    t = p.t0
    record(t, u)
    for k in range(1, n_steps + 1):
        u = stepper.step(u, t)
        t = p.t0 + k * p.dt
        if k % snapshot_stride == 0 or k == n_steps:
            record(t, u)
    return Trajectory(
        times=np.array(times), snapshots=snaps, mu_list=mu_list,
        positions={mu: np.array(v, dtype=float).reshape(-1, 3) for mu, v in pos.items()},
        attained={mu: np.array(v, dtype=bool).reshape(-1, 2) for mu, v in att.items()},
        level_half=np.array(xhalf), max_value=np.array(maxes), mass=np.array(masses),
        h=p.h, dt=p.dt, breach=breach,
    )


class SpeedEstimate(NamedTuple):
    speed: float
    max_deviation: float
    window: tuple
    n_points: int


def global_mean_speed(traj: Trajectory, t_min_gap: float, window: float | None = None) -> SpeedEstimate:
    """Least-squares slope of ``X(t)`` over the trailing window (default: last half).

    ``max_deviation`` is the largest ``|(X(t) - X(s))/(t - s) - slope|`` over
    window pairs with ``t - s >= t_min_gap``.
    """
    t, X = traj.times, traj.level_half
    span = t[-1] - t[0]
    if t_min_gap <= 0 or span < 4.0 * t_min_gap:
        raise WindowTooShort(f"run span {span:g} is shorter than 4 * t_min_gap = {4 * t_min_gap:g}")
    window = 0.5 * span if window is None else window
    if window < t_min_gap:
        raise WindowTooShort("window shorter than t_min_gap")
    sel = t >= t[-1] - window - 1e-12
    ts, xs = t[sel], X[sel]
    slope = float(np.polyfit(ts, xs, 1)[0])
    dt = ts[None, :] - ts[:, None]
    dx = xs[None, :] - xs[:, None]
    ok = dt >= t_min_gap - 1e-12
    dev = float(np.max(np.abs(dx[ok] / dt[ok] - slope))) if np.any(ok) else 0.0
    return SpeedEstimate(slope, dev, (float(ts[0]), float(ts[-1])), int(ts.size))


# ---------------------------------------------------------------------------
# bump-like states


class BumpFit(NamedTuple):
    C: float
    c: float
    rms_log_error: float
    n_nodes: int
    bump_like: bool


def bump_fit(snapshot: GridFunction, exclude_radius: float, fit_radius: float | None = None,
             rms_threshold: float = 0.05, floor: float = UNDERFLOW_FLOOR) -> BumpFit:
    """Fit ``u ~ C exp(-c |x|)`` on ``exclude_radius < |x| <= fit_radius`` by regressing ``log u``."""
    x, u = snapshot.x, snapshot.values
    r = np.abs(x)
    use = (r > exclude_radius) & (u > floor)
    if fit_radius is not None:
        use &= r <= fit_radius
    if np.count_nonzero(use) < 10:
        raise InsufficientSupport(f"only {np.count_nonzero(use)} usable nodes outside |x| = {exclude_radius}")
    slope, icpt = np.polyfit(r[use], np.log(u[use]), 1)
    rms = float(np.sqrt(np.mean((np.log(u[use]) - (icpt + slope * r[use])) ** 2)))
    c = float(-slope)
    return BumpFit(float(np.exp(icpt)), c, rms, int(np.count_nonzero(use)), bool(c > 0 and rms < rms_threshold))


def entire_bump_state(eig, zeta: float, t: float = 0.0, grid: GridFunction | None = None) -> GridFunction:
    """``zeta * exp(lam t) * psi`` for ``t <= 0``, on the eigenpair grid or resampled onto ``grid``."""
    if t > 0:
        raise ValueError("the explicit bump solution is only claimed for t <= 0")
    if zeta <= 0:
        raise ValueError("zeta must be positive")
    amp = zeta * math.exp(eig.lam * t)
    psi = eig.psi
    if grid is None:
        return psi.with_values(amp * psi.values)
    vals = np.interp(grid.x, psi.x, psi.values, left=0.0, right=0.0)
    return grid.with_values(amp * vals)

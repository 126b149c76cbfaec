"""Explicit sub- and super-solutions built from the front profile, and their certification.

All four candidates are shifted copies of the normalised front ``U`` (with
``U(0) = theta0/2``) plus or minus an explicit correction.  Each carries its
exact time derivative so that the residual

    N[c] = c_t - c_xx - f(x, c)

can be sampled with only the spatial derivative approximated.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import PreconditionViolated, SampleOutsideDomain
from .spectral import ContinuumEigenfunction, EigenPair
from .traveling_front import TravelingFront


@dataclass(frozen=True, eq=False)
class CandidateSolution:
    name: str
    kind: str  # "sub" or "super"
    time_domain: tuple
    value: Callable
    time_derivative: Callable
    constants: dict = field(default_factory=dict)

    def __call__(self, t, x):
        return self.value(t, x)


def _shifted_front(tf: TravelingFront, shift_of_t, shift_rate_of_t, y: float):
    """``U(x - c0 (t + s(t)) + y)`` and its time derivative."""
    c0 = tf.speed

    def value(t, x):
        return tf(np.asarray(x, float) - c0 * (np.asarray(t, float) + shift_of_t(t)) + y)

    def dt(t, x):
        z = np.asarray(x, float) - c0 * (np.asarray(t, float) + shift_of_t(t)) + y
        return -c0 * (1.0 + shift_rate_of_t(t)) * tf.derivative(z)

    return value, dt


def _zero(t):
    return np.zeros(np.shape(t))


def make_sub_neg_t(tf: TravelingFront, reaction, y: float, enforce_shift: bool = True) -> CandidateSolution:
    """``v(t, x) = U(x - c0 t + y)``: a sub-solution for ``t <= 0`` when ``y >= L``.

    ``enforce_shift=False`` skips the ``y >= L`` check (used to plant a violation).
    """
    if enforce_shift and y < reaction.L:
        raise PreconditionViolated(f"shift y={y} must be at least L={reaction.L}")
    value, dt = _shifted_front(tf, _zero, _zero, y)
    return CandidateSolution("sub-neg", "sub", (-math.inf, 0.0), value, dt,
                             {"y": y, "c0": tf.speed, "L": reaction.L})


def make_super_neg_t(tf: TravelingFront, eig: EigenPair | ContinuumEigenfunction, reaction, eps: float,
                     zeta: float | None = None) -> CandidateSolution:
    """``w(t, x) = U(x - c0 (t + beta(t)) + y0) + phi(t, x)`` for ``t <= 0``.

    ``phi = zeta/2 exp(sqrt(lam) c0 t) psi(x)`` uses the boosted eigenpair;
    ``beta`` grows like ``exp(2 sqrt(lam) c0 t)`` and absorbs the reaction
    mismatch caused by ``phi`` on the front.
    """
    psi = eig if isinstance(eig, ContinuumEigenfunction) else ContinuumEigenfunction(eig)
    c0, L, gamma = tf.speed, reaction.L, reaction.lipschitz
    lam = psi.lam
    if not c0 * c0 / 16.0 < lam < c0 * c0:
        raise PreconditionViolated(f"boosted eigenvalue {lam:.6g} outside ({c0 * c0 / 16:.6g}, {c0 * c0:.6g})")
    zeta = reaction.zeta_of_eps(eps) if zeta is None else zeta
    theta0, theta1 = reaction.theta0, reaction.theta1
    root = math.sqrt(lam)
    omega = psi.infimum(-L, L)
    eta = c0 * tf.min_slope(0.5 * theta0, 1.0 - theta1)
    beta0 = gamma * zeta / (4.0 * root * c0 * eta)
    target = min(0.5 * zeta, eps * omega * zeta / (2.0 * (gamma + eps)))
    y0 = tf.inverse(target) + c0 * beta0 + L

    def beta(t):
        return beta0 * np.exp(2.0 * root * c0 * np.asarray(t, float))

    def beta_rate(t):
        return 2.0 * root * c0 * beta(t)

    front, front_dt = _shifted_front(tf, beta, beta_rate, y0)

    def phi(t, x):
        return 0.5 * zeta * np.exp(root * c0 * np.asarray(t, float)) * psi(x)

    def value(t, x):
        return front(t, x) + phi(t, x)

    def dt(t, x):
        return front_dt(t, x) + root * c0 * phi(t, x)

    consts = {"y0": y0, "beta0": beta0, "omega": omega, "eta": eta, "eps": eps, "zeta": zeta,
              "lambda_eps": lam, "gamma": gamma, "c0": c0, "L": L, "target": target}
    return CandidateSolution("super-neg", "super", (-math.inf, 0.0), value, dt, consts)


def make_super_pos_t(tf: TravelingFront, reaction) -> CandidateSolution:
    """``w~(t, x) = U(x - c0 (t + beta1(t)) + y1) + phi1(t, x)`` for ``t >= 0``."""
    c0, L, gamma = tf.speed, reaction.L, reaction.lipschitz
    theta0, theta1 = reaction.theta0, reaction.theta1
    y1 = (4.0 / c0) * math.log(0.5 * theta0) - L
    ell = tf.inverse(1.0 - theta1)
    eta = c0 * tf.min_slope(0.5 * theta0, 1.0 - theta1)
    B1 = 8.0 * gamma / (c0 * c0 * eta) * math.exp(-0.25 * c0 * (ell - y1 - L))
    k = c0 * c0 / 8.0

    def beta1(t):
        return B1 * (1.0 - np.exp(-k * np.asarray(t, float)))

    def beta1_rate(t):
        return B1 * k * np.exp(-k * np.asarray(t, float))

    front, front_dt = _shifted_front(tf, beta1, beta1_rate, y1)

    def phi1(t, x):
        return np.exp(-0.25 * c0 * (np.asarray(x, float) - L - 0.5 * c0 * np.asarray(t, float)))

    def value(t, x):
        return front(t, x) + phi1(t, x)

    def dt(t, x):
        return front_dt(t, x) + k * phi1(t, x)

    consts = {"y1": y1, "ell": ell, "B1": B1, "eta": eta, "gamma": gamma, "c0": c0, "L": L}
    return CandidateSolution("super-pos", "super", (0.0, math.inf), value, dt, consts)


def make_sub_pos_t(tf: TravelingFront, reaction, y: float) -> CandidateSolution:
    """``v~(t, x) = U(x - c0 (t + beta2(t)) + y) - phi2(t, x)`` for ``t >= 0``; may be negative."""
    c0, L, gamma = tf.speed, reaction.L, reaction.lipschitz
    theta0, theta1 = reaction.theta0, reaction.theta1
    theta_t = min(0.5 * theta0, 0.5 * theta1, c0 * c0 * theta1 / (32.0 * gamma))
    eta_t = c0 * tf.min_slope(theta_t, 1.0 - theta_t)
    ell_t = tf.inverse(1.0 - theta_t)
    B2 = 2.0**7 * gamma**2 / (c0**4 * eta_t) * math.exp(-0.25 * c0 * (ell_t - y - L))
    k = c0 * c0 / 8.0
    amp = 16.0 * gamma / (c0 * c0)

    def beta2(t):
        return B2 * np.exp(-k * np.asarray(t, float))

    def beta2_rate(t):
        return -k * beta2(t)

    front, front_dt = _shifted_front(tf, beta2, beta2_rate, y)

    def phi2(t, x):
        return amp * np.exp(-0.25 * c0 * (np.asarray(x, float) - L - 0.5 * c0 * np.asarray(t, float)))

    def value(t, x):
        return front(t, x) - phi2(t, x)

    def dt(t, x):
        return front_dt(t, x) - k * phi2(t, x)

    consts = {"y": y, "theta_tilde": theta_t, "eta_tilde": eta_t, "ell_tilde": ell_t, "B2": B2,
              "gamma": gamma, "c0": c0, "L": L}
    return CandidateSolution("sub-pos", "sub", (0.0, math.inf), value, dt, consts)


# ---------------------------------------------------------------------------
# certification


def second_difference(func, x, h):
    """Five-point central approximation of ``func''(x)``."""
    return (-func(x + 2 * h) + 16 * func(x + h) - 30 * func(x) + 16 * func(x - h) - func(x - 2 * h)) / (12 * h * h)


@dataclass
class ResidualReport:
    name: str
    kind: str
    passed: bool
    min_residual: float
    max_residual: float
    worst_point: tuple
    worst_margin: float
    samples: int
    skipped: int
    fd_step: float
    safety: float
    atol: float
    worst_samples: list = field(default_factory=list)  # (t, x, residual, tolerance), most critical first

    def as_dict(self) -> dict:
        d = dict(self.__dict__)
        d.pop("worst_samples")
        d["worst_point"] = list(self.worst_point)
        return d


def certify(c: CandidateSolution, reaction, t_range, x_range, nt: int, nx: int, fd_step: float = 1e-2,
            safety: float = 2.0, atol: float = 1e-9, n_worst: int = 100, tile_rows: int = 8) -> ResidualReport:
    """Sample ``N[c]`` on a ``nt x nx`` box and check its sign within a finite-difference allowance.

    The allowance at each sample is ``safety * (|D_h - D_2h| + |D_2h - D_4h|) + atol``
    plus a round-off term, where ``D_s`` is the five-point second difference at
    step ``s``.  Samples whose widest stencil straddles an x-discontinuity of the
    reaction are skipped and counted.
    """
    t0, t1 = t_range
    lo, hi = c.time_domain
    if t0 < lo or t1 > hi or t0 > t1:
        raise SampleOutsideDomain(f"time range {t_range} not inside {c.time_domain}")
    if nt < 1 or nx < 1:
        raise ValueError("need at least one sample in each direction")
    ts = np.linspace(t0, t1, nt)
    xs = np.linspace(x_range[0], x_range[1], nx)
    breaks = np.asarray(getattr(getattr(reaction, "perturbation", None), "breakpoints", ()) or (), float)
    reach = 8.0 * fd_step
    keep_x = np.ones(nx, dtype=bool)
    for b in breaks:
        keep_x &= np.abs(xs - b) >= reach
    xk = xs[keep_x]
    skipped = int(nt * (nx - xk.size))
    sign = 1.0 if c.kind == "super" else -1.0
    eps_mach = np.finfo(float).eps

    worst = []  # per tile: (margin, t, x, residual, tol)
    rmin, rmax = math.inf, -math.inf
    best = (math.inf, None)
    for start in range(0, nt, tile_rows):
        T, X = np.meshgrid(ts[start:start + tile_rows], xk, indexing="ij")
        T, X = T.ravel(), X.ravel()

        def f_of_x(xx, T=T):
            return c.value(T, xx)

        val = f_of_x(X)
        d1 = second_difference(f_of_x, X, fd_step)
        d2 = second_difference(f_of_x, X, 2 * fd_step)
        d4 = second_difference(f_of_x, X, 4 * fd_step)
        stencil_mag = np.maximum.reduce([np.abs(f_of_x(X + s * fd_step)) for s in (-2, -1, 1, 2)] + [np.abs(val)])
        res = c.time_derivative(T, X) - d1 - np.asarray(reaction(X, val), float)
        tol = safety * (np.abs(d1 - d2) + np.abs(d2 - d4)) + atol + 16.0 * eps_mach * stencil_mag / fd_step**2
        margin = sign * res + tol
        rmin, rmax = min(rmin, float(res.min())), max(rmax, float(res.max()))
        order = np.argsort(margin)[:n_worst]
        worst.extend(zip(margin[order], T[order], X[order], res[order], tol[order]))
        i = int(np.argmin(margin))
        if margin[i] < best[0]:
            best = (float(margin[i]), (float(T[i]), float(X[i])))
    worst.sort(key=lambda w: w[0])
    worst = [(float(t), float(x), float(r), float(tl)) for _, t, x, r, tl in worst[:n_worst]]
    return ResidualReport(
        name=c.name, kind=c.kind, passed=best[0] >= 0.0, min_residual=rmin, max_residual=rmax,
        worst_point=best[1] if best[1] is not None else (math.nan, math.nan), worst_margin=best[0],
        samples=int(nt * xk.size), skipped=skipped, fd_step=fd_step, safety=safety, atol=atol,
        worst_samples=worst,
    )


# ---------------------------------------------------------------------------
# sandwich checks against simulated trajectories


@dataclass
class SandwichReport:
    passed: bool
    worst_margin: float
    worst_time: float
    worst_x: float
    slack: float
    checked_times: int


def check_sandwich(traj, lower: CandidateSolution | None, upper: CandidateSolution | None, slack: float,
                   time_offset: float = 0.0) -> SandwichReport:
    """Check ``max(lower, 0) - slack <= u <= upper + slack`` at every stored snapshot.

    Trajectory time ``t`` corresponds to candidate time ``t + time_offset``;
    snapshots outside a candidate's time domain are not compared against it.
    """
    if not traj.snapshots:
        raise ValueError("trajectory stores no snapshots")
    worst = (math.inf, math.nan, math.nan)
    checked = 0
    for t, snap in zip(traj.times, traj.snapshots):
        tc = float(t) + time_offset
        x, u = snap.x, snap.values
        margins = []
        if lower is not None and lower.time_domain[0] <= tc <= lower.time_domain[1]:
            margins.append(u - np.maximum(lower(tc, x), 0.0) + slack)
        if upper is not None and upper.time_domain[0] <= tc <= upper.time_domain[1]:
            margins.append(upper(tc, x) - u + slack)
        if not margins:
            continue
        checked += 1
        m = np.minimum.reduce(margins)
        i = int(np.argmin(m))
        if m[i] < worst[0]:
            worst = (float(m[i]), tc, float(x[i]))
    if checked == 0:
        raise ValueError("trajectory and candidates share no time")
    return SandwichReport(worst[0] >= 0.0, worst[0], worst[1], worst[2], slack, checked)


def sandwich_slack(h: float, dt: float, curvature_scale: float) -> float:
    """Scheme-error allowance ``10 (dt^2 + h^2) * curvature_scale``."""
    return 10.0 * (dt * dt + h * h) * curvature_scale

"""Ignition-monostable reactions ``f(x, u) = f0(u) + a(x) g(u)`` and their checks.

All evaluators are vectorised and extended by zero outside ``[0, top]`` in ``u``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np


def _as_output(u, out):
    return out.item() if np.ndim(u) == 0 else out


@dataclass(frozen=True, eq=False)
class IgnitionReaction:
    """Homogeneous ignition nonlinearity ``f0``.

    ``f0`` vanishes on ``[0, theta0]`` and at ``top`` (1 for a genuine ignition
    reaction, ``1 + delta`` for the widened reaction of :func:`perturb_ignition`),
    is positive in between and non-increasing on ``[top - theta1, top]``.

    ``peak`` is the maximiser of ``f0`` when ``f0`` is unimodal on its support,
    ``top_slope`` is ``-f0'(top-)``, and ``kinks`` lists levels in ``(theta0, top)``
    where ``f0`` is not smooth; the shooter restarts its integrator there.
    ``continuous=False`` marks test oracles with a jump at ``theta0``; those are
    excluded from Lipschitz checks.
    """

    theta0: float
    theta1: float
    lipschitz: float
    evaluator: Callable[[np.ndarray], np.ndarray]
    top: float = 1.0
    peak: float | None = None
    top_slope: float | None = None
    kinks: tuple = ()
    continuous: bool = True
    name: str = "custom"

    def __post_init__(self):
        if not 0.0 < self.theta0 < self.top:
            raise ValueError(f"theta0 must lie in (0, top), got {self.theta0}")
        if not 0.0 < self.theta1 < self.top:
            raise ValueError(f"theta1 must lie in (0, top), got {self.theta1}")
        if self.lipschitz < 0:
            raise ValueError("lipschitz constant must be non-negative")

    def __call__(self, u):
        u_arr = np.asarray(u, dtype=float)
        out = np.zeros(u_arr.shape)
        inside = (u_arr > 0.0) & (u_arr < self.top)
        if np.any(inside):
            out[inside] = self.evaluator(u_arr[inside])
        return _as_output(u, out)

    def decay_slope(self) -> float:
        """``-f0'(top-)``, estimated by a one-sided difference when not supplied."""
        if self.top_slope is not None:
            return float(self.top_slope)
        s = 1e-6 * self.top
        return float(self(self.top - s) / s)


@dataclass(frozen=True, eq=False)
class Perturbation:
    """Compactly supported ``a(x) >= 0`` with ``a = 0`` for ``|x| >= support_half_width``.

    ``breakpoints`` are the x-locations where ``a`` jumps.
    """

    support_half_width: float
    evaluator: Callable[[np.ndarray], np.ndarray]
    bound: float
    breakpoints: tuple = ()
    name: str = "custom"

    def __post_init__(self):
        if self.support_half_width <= 0:
            raise ValueError("support half-width L must be positive")

    def __call__(self, x):
        x_arr = np.asarray(x, dtype=float)
        out = np.asarray(self.evaluator(x_arr), dtype=float) * np.ones(x_arr.shape)
        return _as_output(x, out)


@dataclass(frozen=True, eq=False)
class MixedReaction:
    """Full reaction ``f(x, u)`` together with the data the hypotheses refer to.

    ``exact_linear_zone`` is a ``zeta`` with ``f(x, u) = a(x) u`` on ``[0, zeta]``;
    when it is set, ``zeta_of_eps`` returns it for every ``eps``.  Otherwise
    ``zeta_table`` holds user-supplied ``(eps, zeta)`` pairs.
    """

    base: IgnitionReaction
    perturbation: Perturbation
    evaluator: Callable[[np.ndarray, np.ndarray], np.ndarray]
    lipschitz: float
    exact_linear_zone: float | None = None
    zeta_table: tuple = ()
    name: str = "custom"
    # (f0, a, g) when f = f0(u) + a(x) g(u) exactly; lets solvers tabulate a(x) once
    components: tuple | None = None

    @property
    def L(self) -> float:
        return self.perturbation.support_half_width

    @property
    def theta0(self) -> float:
        return self.base.theta0

    @property
    def theta1(self) -> float:
        return self.base.theta1

    def a(self, x):
        return self.perturbation(x)

    def zeta_of_eps(self, eps: float) -> float:
        if eps <= 0:
            raise ValueError("eps must be positive")
        if self.exact_linear_zone is not None:
            return float(self.exact_linear_zone)
        # (F3) for eps_i implies (F3) with the same zeta for every eps >= eps_i.
        usable = [z for e, z in self.zeta_table if e <= eps]
        if not usable:
            raise ValueError(f"no zeta known for eps={eps}")
        return float(max(usable))

    def __call__(self, x, u):
        x_arr, u_arr = np.broadcast_arrays(np.asarray(x, float), np.asarray(u, float))
        out = np.zeros(x_arr.shape)
        inside = (u_arr > 0.0) & (u_arr < 1.0)
        if np.any(inside):
            out[inside] = self.evaluator(x_arr[inside], u_arr[inside])
        return out.item() if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# constructors


def quadratic_ignition(theta0: float = 0.25) -> IgnitionReaction:
    """``f0(u) = (u - theta0)(1 - u)`` on ``[theta0, 1]``; ``theta1`` at the parabola's peak."""

    def f0(u):
        return np.where(u > theta0, (u - theta0) * (1.0 - u), 0.0)

    return IgnitionReaction(
        theta0=theta0,
        theta1=(1.0 - theta0) / 2.0,
        lipschitz=1.0 - theta0,
        evaluator=f0,
        peak=(1.0 + theta0) / 2.0,
        top_slope=1.0 - theta0,
        name="quadratic",
    )


def step_ignition(theta0: float = 0.25) -> IgnitionReaction:
    """Discontinuous oracle ``f0(u) = (1 - u) 1[u >= theta0]``.

    Its front speed is ``(1 - theta0)/sqrt(theta0)``.  Not Lipschitz; meant
    for tests of the shooter only.
    """

    def f0(u):
        return np.where(u >= theta0, 1.0 - u, 0.0)

    return IgnitionReaction(
        theta0=theta0,
        theta1=1.0 - theta0,
        lipschitz=np.inf,
        evaluator=f0,
        peak=theta0,
        top_slope=1.0,
        continuous=False,
        name="step",
    )


def tabulated_ignition(
    u_samples: Sequence[float],
    f_samples: Sequence[float],
    theta0: float,
    theta1: float,
) -> IgnitionReaction:
    """Piecewise-linear ``f0`` through ``(u_samples, f_samples)``."""
    u_s = np.asarray(u_samples, dtype=float)
    f_s = np.asarray(f_samples, dtype=float)
    if u_s.ndim != 1 or u_s.shape != f_s.shape or u_s.size < 2:
        raise ValueError("u and f tables must be 1-D sequences of equal length >= 2")
    if np.any(np.diff(u_s) <= 0):
        raise ValueError("u samples must be strictly increasing")
    lipschitz = float(np.max(np.abs(np.diff(f_s) / np.diff(u_s))))
    positive = f_s > 0
    peak = None
    if np.any(positive):
        imax = int(np.argmax(f_s))
        rising = np.all(np.diff(f_s[: imax + 1]) >= 0)
        falling = np.all(np.diff(f_s[imax:]) <= 0)
        if rising and falling:
            peak = float(u_s[imax])
    kinks = tuple(float(v) for v in u_s if theta0 < v < 1.0)
    top_slope = None
    if u_s[-1] >= 1.0 and u_s[-2] < 1.0:
        top_slope = float(np.interp(u_s[-2], u_s, f_s) / (1.0 - u_s[-2]))

    def f0(u):
        return np.interp(u, u_s, f_s, left=0.0, right=0.0)

    return IgnitionReaction(
        theta0=theta0,
        theta1=theta1,
        lipschitz=lipschitz,
        evaluator=f0,
        peak=peak,
        top_slope=top_slope,
        kinks=kinks,
        name="table",
    )


def square_well_perturbation(amplitude: float, half_width: float) -> Perturbation:
    if amplitude < 0:
        raise ValueError("amplitude A must be non-negative")

    def a(x):
        return np.where(np.abs(x) <= half_width, amplitude, 0.0)

    return Perturbation(
        support_half_width=half_width,
        evaluator=a,
        bound=amplitude,
        breakpoints=(-half_width, half_width) if amplitude > 0 else (),
        name="square_well",
    )


def tabulated_perturbation(x_samples, a_samples, half_width: float | None = None) -> Perturbation:
    x_s = np.asarray(x_samples, dtype=float)
    a_s = np.asarray(a_samples, dtype=float)
    if x_s.ndim != 1 or x_s.shape != a_s.shape or x_s.size < 2:
        raise ValueError("x and a tables must be 1-D sequences of equal length >= 2")
    if np.any(np.diff(x_s) <= 0):
        raise ValueError("x samples must be strictly increasing")
    if half_width is None:
        half_width = float(max(abs(x_s[0]), abs(x_s[-1])))

    def a(x):
        return np.interp(x, x_s, a_s, left=0.0, right=0.0)

    return Perturbation(
        support_half_width=half_width,
        evaluator=a,
        bound=float(max(a_s.max(), 0.0)),
        name="table",
    )


def linear_zone_profile(zeta: float):
    """``g(u) = min(u, zeta (1 - u)/(1 - zeta))`` on ``[0, 1]``: equal to ``u`` up to ``zeta``, 0 at 1."""

    def g(u):
        return np.clip(np.minimum(u, zeta * (1.0 - u) / (1.0 - zeta)), 0.0, 1.0)

    return g


def compose_reaction(f0: IgnitionReaction, a: Perturbation, zeta: float, name: str = "custom") -> MixedReaction:
    """``f(x, u) = f0(u) + a(x) g(u)`` with ``g`` from :func:`linear_zone_profile`."""
    if not 0.0 < zeta < f0.theta0:
        raise ValueError(f"zeta must lie in (0, theta0={f0.theta0}), got {zeta}")
    if f0.top != 1.0:
        raise ValueError("mixed reactions need an ignition base with top = 1")
    g = linear_zone_profile(zeta)

    def f(x, u):
        return f0(u) + a(x) * g(u)

    return MixedReaction(
        base=f0,
        perturbation=a,
        evaluator=f,
        lipschitz=f0.lipschitz + a.bound * max(1.0, zeta / (1.0 - zeta)),
        exact_linear_zone=zeta,
        name=name,
        components=(f0, a, g),
    )


def build_square_well(f0: IgnitionReaction, amplitude: float, half_width: float, zeta: float) -> MixedReaction:
    """Square-well perturbation ``a = A 1[-L, L]`` of ``f0``; ``f = a(x) u`` exactly on ``[0, zeta]``."""
    if amplitude < 0:
        raise ValueError("amplitude A must be non-negative")
    return compose_reaction(f0, square_well_perturbation(amplitude, half_width), zeta, name="square_well")


def build_quenched_well(f0: IgnitionReaction, amplitude: float, half_width: float, zeta: float) -> MixedReaction:
    """Like :func:`build_square_well`, but ``f0`` is switched off on ``[-L, L]``.

    Inside the well ``f = A g(u)`` only, so ``f < f0`` there for large ``u``.
    """
    well = compose_reaction(f0, square_well_perturbation(amplitude, half_width), zeta)
    a = Perturbation(half_width, well.perturbation.evaluator, amplitude, (-half_width, half_width), "quenched_well")
    g = linear_zone_profile(zeta)

    def f(x, u):
        return np.where(np.abs(x) <= half_width, 0.0, f0(u)) + a(x) * g(u)

    return MixedReaction(base=f0, perturbation=a, evaluator=f, lipschitz=well.lipschitz,
                         exact_linear_zone=zeta, name="quenched_well")


def perturb_ignition(f0: IgnitionReaction, delta: float, n_window: int = 401) -> IgnitionReaction:
    """Widened reaction ``f_delta(u) = max_{|v - u| <= delta} f0(v)``.

    Threshold ``theta0 - delta``, positive on ``(theta0 - delta, 1 + delta)``.
    For unimodal ``f0`` the maximiser is the peak clipped to the window; other
    reactions fall back to a dense scan of ``n_window`` points per window.
    """
    if not 0.0 < delta < f0.theta0:
        raise ValueError(f"delta must lie in (0, theta0={f0.theta0}), got {delta}")

    if f0.peak is not None:
        peak = f0.peak

        def f_delta(u):
            return f0(np.clip(peak, u - delta, u + delta))

        kinks = (peak - delta, peak + delta)
    else:
        offsets = delta * np.linspace(-1.0, 1.0, n_window)

        def f_delta(u):
            u = np.asarray(u, dtype=float)
            out = np.empty(u.shape)
            flat, res = u.ravel(), out.ravel()
            for start in range(0, flat.size, 2048):
                chunk = flat[start:start + 2048]
                res[start:start + 2048] = f0(chunk[:, None] + offsets[None, :]).max(axis=1)
            return out

        kinks = ()
    kinks = kinks + tuple(k + s for k in f0.kinks for s in (-delta, delta))
    top = f0.top + delta
    kinks = tuple(sorted(k for k in kinks if f0.theta0 - delta < k < top))

    return IgnitionReaction(
        theta0=f0.theta0 - delta,
        theta1=f0.theta1,
        lipschitz=f0.lipschitz,
        evaluator=f_delta,
        top=top,
        peak=f0.peak,
        top_slope=f0.top_slope,
        kinks=kinks,
        continuous=f0.continuous,
        name=f"{f0.name}+delta",
    )


# ---------------------------------------------------------------------------
# hypothesis checks


class Violation(NamedTuple):
    tag: str
    point: tuple
    value: float
    check: str


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def tags(self) -> set:
        return {v.tag for v in self.violations}


def _symmetric_grid(extent: float, n: int) -> np.ndarray:
    half = (n - 1) / 2.0
    return extent * (np.arange(n) - half) / half


def _record_rows(report, tag, check, x, u, bad, measure):
    """One violation per x-row: the worst offending u-sample."""
    for i in np.nonzero(bad.any(axis=1))[0]:
        scores = np.where(bad[i], np.abs(measure[i]), -np.inf)
        j = int(np.argmax(scores))
        report.violations.append(Violation(tag, (float(x[i]), float(u[j])), float(measure[i, j]), check))


def validate_ignition(f0: IgnitionReaction, n_u: int = 2001, tol: float = 1e-12, report=None) -> ValidationReport:
    report = ValidationReport() if report is None else report
    u = f0.top * np.arange(n_u) / (n_u - 1)
    fu = f0(u)
    below = u < f0.theta0 if not f0.continuous else u <= f0.theta0
    for j in np.nonzero(below & (np.abs(fu) > tol))[0]:
        report.violations.append(Violation("F2", (float(u[j]),), float(fu[j]), "f0 vanishes below theta0"))
    if abs(f0(f0.top)) > tol:
        report.violations.append(Violation("F2", (f0.top,), float(f0(f0.top)), "f0 vanishes at top"))
    interior = (u > f0.theta0) & (u < f0.top)
    for j in np.nonzero(interior & (fu <= 0))[0]:
        report.violations.append(Violation("F2", (float(u[j]),), float(fu[j]), "f0 positive on (theta0, top)"))
    tail = u >= f0.top - f0.theta1
    d = np.diff(fu[tail])
    for j in np.nonzero(d > tol)[0]:
        report.violations.append(
            Violation("F2", (float(u[tail][j + 1]),), float(d[j]), "f0 non-increasing near top")
        )
    if f0.continuous:
        slopes = np.abs(np.diff(fu)) / np.diff(u)
        for j in np.nonzero(slopes > f0.lipschitz * (1 + 1e-9) + tol)[0]:
            report.violations.append(Violation("F1", (float(u[j]),), float(slopes[j]), "f0 Lipschitz"))
        if np.any(fu < -tol):
            j = int(np.argmin(fu))
            report.violations.append(Violation("F1", (float(u[j]),), float(fu[j]), "f0 non-negative"))
    return report


def validate_hypotheses(
    r: MixedReaction,
    eps_list: Sequence[float] = (0.05, 0.1, 0.2),
    n_u: int = 2001,
    n_x: int = 4001,
    tol: float = 1e-12,
    x_extent: float | None = None,
    chunk: int = 256,
) -> ValidationReport:
    """Sample (F1)-(F3) on ``[-3L, 3L] x [0, 1]``.

    Violations are data: each is tagged with the hypothesis and the worst
    offending ``u`` for every offending ``x``-sample.  The Lipschitz part of
    (F1) is skipped for reactions whose base is flagged ``continuous=False``.
    """
    if n_u < 3 or n_x < 3:
        raise ValueError("sampling resolutions must be at least 3")
    report = validate_ignition(r.base, n_u=n_u, tol=tol)
    L = r.L
    x_all = _symmetric_grid(3.0 * L if x_extent is None else x_extent, n_x)
    u = np.arange(n_u) / (n_u - 1)
    du = np.diff(u)
    f0u = r.base(u)
    gamma = r.lipschitz
    zetas = [(eps, r.zeta_of_eps(eps)) for eps in eps_list]

    a_all = np.asarray(r.a(x_all), dtype=float)
    for i in np.nonzero(a_all < -tol)[0]:
        report.violations.append(Violation("F3", (float(x_all[i]),), float(a_all[i]), "a(x) >= 0"))
    for i in np.nonzero((np.abs(x_all) >= L) & (np.abs(a_all) > tol))[0]:
        report.violations.append(Violation("F2", (float(x_all[i]),), float(a_all[i]), "a(x) = 0 for |x| >= L"))
    for i in np.nonzero(a_all > gamma * (1 + 1e-12) + tol)[0]:
        report.violations.append(Violation("F1", (float(x_all[i]),), float(a_all[i]), "a(x) <= gamma"))

    for start in range(0, n_x, chunk):
        x = x_all[start:start + chunk]
        a = a_all[start:start + chunk][:, None]
        F = r(x[:, None], u[None, :])

        _record_rows(report, "F1", "f >= 0", x, u, F < -tol, F)
        ends = np.zeros_like(F, dtype=bool)
        ends[:, 0] = np.abs(F[:, 0]) > tol
        ends[:, -1] = np.abs(F[:, -1]) > tol
        _record_rows(report, "F1", "f(x,0) = f(x,1) = 0", x, u, ends, F)
        if r.base.continuous:
            slope = np.zeros_like(F)
            slope[:, :-1] = np.abs(np.diff(F, axis=1)) / du
            _record_rows(report, "F1", "Lipschitz in u", x, u, slope > gamma * (1 + 1e-9) + tol, slope)

        outside = (np.abs(x) >= L)[:, None]
        diff = F - f0u[None, :]
        _record_rows(report, "F2", "f = f0 for |x| >= L", x, u, outside & (np.abs(diff) > tol), diff)

        for eps, zeta in zetas:
            zone = (u <= zeta)[None, :]
            low = (1.0 - eps) * a * u[None, :] - F
            high = F - (a + eps) * u[None, :]
            _record_rows(report, "F3", f"lower bound eps={eps}", x, u, zone & (low > tol), low)
            _record_rows(report, "F3", f"upper bound eps={eps}", x, u, zone & (high > tol), high)
    return report

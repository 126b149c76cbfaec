"""Principal eigenpairs of ``d^2/dx^2 + q(x)`` for compactly supported ``q >= 0``.

The operator is discretised by the 3-point central difference on nodes ``i*h``
(the origin is always a node); ``q`` is sampled by a two-point cell average so
that jumps sitting on nodes keep second-order accuracy.  The top of the
spectrum is located by Sturm-sequence bisection, the eigenvector by shifted
inverse iteration.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import linalg, optimize
from scipy.integrate import solve_ivp, trapezoid

from .errors import NoPositiveEigenvalue, NonConvergence, ZeroFunction
from .grid import GridFunction, cell_average, symmetric_nodes
from .reactions import Perturbation


@dataclass(frozen=True, eq=False)
class EigenProblem:
    """Eigenproblem for ``psi'' + q psi = lambda psi``.

    ``boundary`` is ``"full_line"`` (truncated at ``truncation_radius`` with a
    Dirichlet condition; chosen automatically when ``None``) or ``"dirichlet"``
    on ``[-dirichlet_half_width, dirichlet_half_width]``.
    """

    potential: Callable[[np.ndarray], np.ndarray]
    support_radius: float
    h: float = 0.01
    boundary: str = "full_line"
    dirichlet_half_width: float | None = None
    truncation_radius: float | None = None
    breakpoints: tuple = ()
    max_radius: float | None = None

    def __post_init__(self):
        if self.h <= 0:
            raise ValueError("grid spacing must be positive")
        if self.boundary not in ("full_line", "dirichlet"):
            raise ValueError(f"unknown boundary mode {self.boundary!r}")
        if self.boundary == "dirichlet":
            if self.dirichlet_half_width is None or self.dirichlet_half_width <= 0:
                raise ValueError("Dirichlet mode needs M > 0")
        elif self.truncation_radius is not None and self.truncation_radius <= self.support_radius:
            raise ValueError("truncation radius must exceed the support radius of q")


@dataclass(frozen=True, eq=False)
class EigenPair:
    lam: float
    psi: GridFunction
    residual_norm: float
    h: float
    radius: float
    boundary: str
    potential: Callable | None = None
    support_radius: float | None = None
    breakpoints: tuple = ()

    @property
    def x(self):
        return self.psi.x


def potential_problem(
    a: Perturbation,
    h: float = 0.01,
    boost: float = 0.0,
    scale: float = 1.0,
    dirichlet: float | None = None,
    truncation_radius: float | None = None,
) -> EigenProblem:
    """Problem for ``q = scale*a + 2*boost*1[-L, L]``.

    ``scale = 1 - eps`` gives the weakened operator, ``boost = eps`` the boosted one.
    """
    L = a.support_half_width

    def q(x):
        x = np.asarray(x, dtype=float)
        out = scale * np.asarray(a(x), dtype=float)
        if boost:
            out = out + 2.0 * boost * (np.abs(x) <= L)
        return out

    breakpoints = tuple(a.breakpoints)
    if boost:
        breakpoints = tuple(sorted(set(breakpoints) | {-L, L}))
    return EigenProblem(
        potential=q,
        support_radius=L,
        h=h,
        boundary="dirichlet" if dirichlet is not None else "full_line",
        dirichlet_half_width=dirichlet,
        truncation_radius=truncation_radius,
        breakpoints=breakpoints,
    )


# ---------------------------------------------------------------------------
# tridiagonal machinery


def count_above(diag: np.ndarray, off: float, sigma: float) -> int:
    """Number of eigenvalues of the symmetric tridiagonal matrix that exceed ``sigma``.

    Sturm count via the pivots of ``LDL^T`` of ``T - sigma I``; ``off`` is the
    constant off-diagonal entry.
    """
    off2 = off * off
    tiny = 1e-300
    negatives = 0
    d = None
    for a in diag.tolist():
        if d is None:
            d = a - sigma
        else:
            d = a - sigma - (off2 / d if d != 0.0 else off2 / tiny)
        if d < 0.0:
            negatives += 1
    return len(diag) - negatives


def _bisect_top(diag: np.ndarray, off: float, tol: float) -> float:
    hi = float(diag.max() + 2.0 * abs(off))
    lo = float(diag.min() - 2.0 * abs(off))
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if count_above(diag, off, mid) >= 1:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _inverse_iteration(diag, off, lam, tol, max_iter=100):
    n = diag.size
    shift = lam + max(10.0 * tol, 1e-9 * max(1.0, abs(lam)))
    ab = np.empty((3, n))
    ab[0, :] = off
    ab[2, :] = off
    ab[1, :] = diag - shift
    v = np.ones(n)
    for _ in range(max_iter):
        w = linalg.solve_banded((1, 1), ab, v)
        w /= w[np.argmax(np.abs(w))]
        # round-off keeps successive iterates ~1e-12 apart once converged
        if np.max(np.abs(w - v)) < 1e-10:
            return w
        v = w
    raise NonConvergence("inverse iteration did not converge")


def _solve_on(p: EigenProblem, radius: float, h: float, tol: float, need_vector: bool = True):
    nodes = symmetric_nodes(radius, h)
    interior = nodes[1:-1]
    q = cell_average(p.potential, interior, h)
    off = 1.0 / (h * h)
    diag = q - 2.0 * off
    lam = _bisect_top(diag, off, tol)
    if not need_vector:
        return lam, None, None, nodes
    v = _inverse_iteration(diag, off, lam, tol)
    if v.sum() < 0:
        v = -v
    v = v / v.max()
    tv = diag * v
    tv[1:] += off * v[:-1]
    tv[:-1] += off * v[1:]
    residual = float(np.max(np.abs(tv - lam * v)))
    psi = np.concatenate(([0.0], v, [0.0]))
    return lam, psi, residual, nodes


def _auto_radius(p: EigenProblem, tol: float) -> float:
    """Truncation ``R_q + max(10, 8/sqrt(lambda))``, iterated from a coarse estimate."""
    base = p.support_radius
    cap = p.max_radius if p.max_radius is not None else base + 160.0
    h_est = max(p.h, min(0.05, base / 4.0))
    radius = base + 10.0
    while True:
        nodes = symmetric_nodes(radius, h_est)
        q = cell_average(p.potential, nodes[1:-1], h_est)
        off = 1.0 / h_est**2
        diag = q - 2.0 * off
        if count_above(diag, off, tol) >= 1:
            lam = _bisect_top(diag, off, max(tol, 1e-8))
            wanted = base + max(10.0, 8.0 / math.sqrt(lam))
            if wanted <= radius * 1.0001:
                return radius
            radius = min(wanted, cap)
            if radius == cap:
                return radius
        else:
            if radius >= cap:
                raise NoPositiveEigenvalue(
                    f"no eigenvalue above {tol:g} up to truncation radius {cap:g}; lambda reported as 0"
                )
            radius = min(2.0 * radius, cap)


def principal_eigenpair(p: EigenProblem, tol: float = 1e-10) -> EigenPair:
    """Largest eigenvalue of the discretised operator and its sup-normalised eigenvector.

    Raises :class:`NoPositiveEigenvalue` in full-line mode when nothing lies
    above ``tol`` (``q`` is effectively trivial and lambda is 0).
    """
    if p.boundary == "dirichlet":
        radius = p.dirichlet_half_width
    else:
        radius = p.truncation_radius if p.truncation_radius is not None else _auto_radius(p, tol)
    lam, psi, residual, nodes = _solve_on(p, radius, p.h, tol)
    if p.boundary == "full_line" and lam <= tol:
        raise NoPositiveEigenvalue(f"largest discrete eigenvalue {lam:g} <= {tol:g}; lambda reported as 0")
    return EigenPair(
        lam=lam,
        psi=GridFunction(float(nodes[0]), p.h, psi),
        residual_norm=residual,
        h=p.h,
        radius=float(nodes[-1]),
        boundary=p.boundary,
        potential=p.potential,
        support_radius=p.support_radius,
        breakpoints=p.breakpoints,
    )


def principal_eigenvalue(p: EigenProblem, tol: float = 1e-10) -> float:
    """Top of the spectrum; 0 when there is no positive eigenvalue (full-line mode)."""
    try:
        return principal_eigenpair(p, tol).lam
    except NoPositiveEigenvalue:
        return 0.0


def boosted_eigenpair(a: Perturbation, eps: float, h: float = 0.01, tol: float = 1e-10, **kw) -> EigenPair:
    """Eigenpair of ``d^2/dx^2 + a(x) + 2 eps 1[-L, L]``."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    return principal_eigenpair(potential_problem(a, h=h, boost=eps, **kw), tol)


def select_boost(
    a: Perturbation,
    c0: float,
    h: float = 0.01,
    tol: float = 1e-10,
    search_h: float = 0.05,
    rel_tol: float = 0.05,
):
    """Pick ``eps > 0`` with ``lambda^eps`` in ``(c0^2/16, c0^2)``.

    Aims at the geometric midpoint of ``[max(lambda, c0^2/16), c0^2]`` by bisection
    on a coarse grid, then solves once at spacing ``h``.  Returns ``(eps, pair)``.
    """
    from .errors import PreconditionViolated

    lo_target, hi_target = c0 * c0 / 16.0, c0 * c0
    lam0 = principal_eigenvalue(potential_problem(a, h=search_h), tol)
    if lam0 >= hi_target:
        raise PreconditionViolated(f"lambda={lam0:.6g} >= c0^2={hi_target:.6g}: no admissible boost")
    target = math.sqrt(max(lam0, lo_target) * hi_target)

    def lam_of(eps, step):
        return boosted_eigenpair(a, eps, h=step, tol=tol).lam

    e_lo, e_hi = 0.0, max(target, 1e-3)
    while lam_of(e_hi, search_h) < target:
        e_lo, e_hi = e_hi, 2.0 * e_hi
    eps = e_hi
    for _ in range(60):
        eps = 0.5 * (e_lo + e_hi)
        lam = lam_of(eps, search_h)
        if abs(math.log(lam / target)) < rel_tol:
            break
        if lam < target:
            e_lo = eps
        else:
            e_hi = eps
    pair = boosted_eigenpair(a, eps, h=h, tol=tol)
    if not lo_target < pair.lam < hi_target:
        raise PreconditionViolated(f"boosted eigenvalue {pair.lam:.6g} left ({lo_target:.6g}, {hi_target:.6g})")
    return eps, pair


# ---------------------------------------------------------------------------
# diagnostics


@dataclass(frozen=True)
class TailBound:
    passed: bool
    worst_margin: float
    worst_x: float


def check_tail_bound(e: EigenPair, L: float, atol: float = 1e-8) -> TailBound:
    """Check ``psi(x) <= min(1, exp(-sqrt(lambda)(|x| - L)))`` at every node.

    The allowance is ``atol`` plus the dispersion of the 3-point stencil, whose
    exterior solutions decay like ``exp(-kappa_h |x|)`` with
    ``cosh(kappa_h h) = 1 + lambda h^2/2``.  ``worst_margin`` is the smallest
    ``bound - psi`` (negative when the bound is exceeded).
    """
    if e.lam <= 0:
        raise ValueError("tail bound needs a positive eigenvalue")
    x = e.psi.x
    psi = e.psi.values
    rate = math.sqrt(e.lam)
    dist = np.maximum(np.abs(x) - L, 0.0)
    bound = np.minimum(1.0, np.exp(-rate * (np.abs(x) - L)))
    kappa_h = math.acosh(1.0 + 0.5 * e.lam * e.h * e.h) / e.h
    allowance = atol + bound * np.expm1(max(rate - kappa_h, 0.0) * dist)
    margin = bound - psi
    i = int(np.argmin(margin))
    return TailBound(bool(np.all(margin >= -allowance)), float(margin[i]), float(x[i]))


def rayleigh_quotient(psi: GridFunction, q: Callable) -> float:
    """``(int -psi'^2 + q psi^2) / int psi^2`` with cell differences and trapezoid sums."""
    v = psi.values
    norm2 = float(trapezoid(v * v, dx=psi.h))
    if norm2 <= 0.0:
        raise ZeroFunction("Rayleigh quotient of the zero function")
    grad2 = float(np.sum(np.diff(v) ** 2) / psi.h)
    qv = cell_average(q, psi.x, psi.h)
    return (-grad2 + float(trapezoid(qv * v * v, dx=psi.h))) / norm2


# ---------------------------------------------------------------------------
# continuum eigenfunction


class ContinuumEigenfunction:
    """Smooth evaluator of the principal eigenfunction on the whole line.

    Starting from a grid eigenpair, the eigenvalue is refined by shooting the
    ODE ``psi'' = (lambda - q) psi`` across ``[-R_q, R_q]`` from the decaying
    exponential on the left to the decaying exponential on the right.  Outside
    the support the exact exponentials are used, so ``psi'' = (lambda - q) psi``
    holds pointwise (up to the integrator tolerance).  Sup-normalised.
    """

    def __init__(self, pair: EigenPair, rtol: float = 1e-12, atol: float = 1e-14):
        if pair.boundary != "full_line" or pair.potential is None or pair.support_radius is None:
            raise ValueError("continuum refinement needs a full-line eigenpair with its potential")
        self.q = pair.potential
        self.R = float(pair.support_radius)
        inner = sorted(b for b in pair.breakpoints if -self.R < b < self.R)
        self.knots = [-self.R, *inner, self.R]
        self._rtol, self._atol = rtol, atol
        self.lam = self._refine(pair.lam)
        self.rate = math.sqrt(self.lam)
        self._segments = self._shoot(self.lam, dense=True)
        xs = np.linspace(-self.R, self.R, 4001)
        vals = self._inside(xs)[0]
        i = int(np.argmax(vals))
        lo, hi = xs[max(i - 1, 0)], xs[min(i + 1, xs.size - 1)]
        res = optimize.minimize_scalar(lambda s: -self._inside(np.array([s]))[0][0], bounds=(lo, hi),
                                       method="bounded", options={"xatol": 1e-12})
        self.scale = max(vals[i], -res.fun)
        self.argmax = float(res.x if -res.fun >= vals[i] else xs[i])
        self._left = self._inside(np.array([-self.R]))
        self._right = self._inside(np.array([self.R]))

    def _shoot(self, lam, dense=False):
        y = [1.0, math.sqrt(lam)]
        segments = []
        for a, b in zip(self.knots[:-1], self.knots[1:]):
            # q is read strictly inside the segment so jumps at the knots never leak in
            pad = 1e-12 * (b - a)

            def f(x, z, a=a, b=b, pad=pad):
                return [z[1], (lam - float(self.q(min(max(x, a + pad), b - pad)))) * z[0]]

            sol = solve_ivp(f, (a, b), y, method="DOP853", rtol=self._rtol, atol=self._atol, dense_output=dense)
            if not sol.success:
                raise NonConvergence(f"eigenfunction shooting failed: {sol.message}")
            y = sol.y[:, -1]
            segments.append((a, b, sol.sol if dense else None))
        return segments if dense else y

    def _mismatch(self, lam):
        psi, dpsi = self._shoot(lam)
        return dpsi + math.sqrt(lam) * psi

    def _refine(self, lam_grid):
        lo, hi = lam_grid * 0.98, lam_grid * 1.02
        m_lo, m_hi = self._mismatch(lo), self._mismatch(hi)
        k = 0
        while m_lo * m_hi > 0:
            k += 1
            if k > 30:
                raise NonConvergence("could not bracket the continuum eigenvalue")
            lo, hi = max(lo * 0.9, 1e-300), hi * 1.1
            m_lo, m_hi = self._mismatch(lo), self._mismatch(hi)
        return optimize.brentq(self._mismatch, lo, hi, xtol=1e-15, maxiter=200)

    def _inside(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros((2,) + x.shape)
        for a, b, sol in self._segments:
            m = (x >= a) & (x <= b)
            if np.any(m):
                out[:, m] = sol(x[m])
        return out

    def __call__(self, x):
        return self.evaluate(x)[0]

    def derivative(self, x):
        return self.evaluate(x)[1]

    def evaluate(self, x):
        """``(psi(x), psi'(x))``, sup-normalised."""
        x = np.asarray(x, dtype=float)
        out = self._inside(np.clip(x, -self.R, self.R))
        left, right = x < -self.R, x > self.R
        if np.any(left):
            e = np.exp(self.rate * (x[left] + self.R))
            out[0, left] = self._left[0, 0] * e
            out[1, left] = self.rate * self._left[0, 0] * e
        if np.any(right):
            e = np.exp(-self.rate * (x[right] - self.R))
            out[0, right] = self._right[0, 0] * e
            out[1, right] = -self.rate * self._right[0, 0] * e
        return out / self.scale

    def second_derivative(self, x):
        x = np.asarray(x, dtype=float)
        return (self.lam - np.asarray(self.q(x), dtype=float)) * self(x)

    def infimum(self, lo: float, hi: float, n: int = 4001) -> float:
        xs = np.linspace(lo, hi, n)
        return float(np.min(self(xs)))

"""Experiment orchestration: regime classification, front and bump pipelines, sweeps, reports."""
from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .comparison import (
    certify,
    check_sandwich,
    make_sub_neg_t,
    make_sub_pos_t,
    make_super_neg_t,
    make_super_pos_t,
    sandwich_slack,
)
from .config import ExperimentConfig, build_reaction
from .errors import FrontLabError, GridEmpty, NoPositiveEigenvalue, PreconditionViolated
from .grid import GridFunction
from .pde import (
    CauchyProblem,
    Dirichlet,
    bump_fit,
    entire_bump_state,
    global_mean_speed,
    run_cauchy,
)
from .reactions import build_square_well, validate_hypotheses
from .spectral import (
    boosted_eigenpair,
    check_tail_bound,
    potential_problem,
    principal_eigenpair,
    principal_eigenvalue,
    select_boost,
)
from .traveling_front import FrontSolveSettings, TravelingFront, solve_front

SUBCRITICAL, SUPERCRITICAL, NEAR_CRITICAL = "subcritical", "supercritical", "near-critical"


# ---------------------------------------------------------------------------
# regime


@dataclass(frozen=True)
class RegimeReport:
    lam: float
    c0: float
    ratio: float
    regime: str
    margin: float

    def as_dict(self) -> dict:
        return asdict(self)


def regime_of(ratio: float, margin: float = 0.05) -> str:
    if abs(ratio - 1.0) < margin:
        return NEAR_CRITICAL
    return SUBCRITICAL if ratio < 1.0 else SUPERCRITICAL


def front_settings(cfg: ExperimentConfig) -> FrontSolveSettings:
    return FrontSolveSettings(speed_tol=cfg.grid["speed_tol"], ode_step=cfg.grid["ode_step"])


def classify_regime(reaction, h: float = 0.01, margin: float = 0.05, tol: float = 1e-10,
                    front: TravelingFront | None = None, settings: FrontSolveSettings | None = None,
                    validate: bool = True) -> RegimeReport:
    """Compare the top of the spectrum of ``d^2/dx^2 + a`` with ``c0^2``."""
    if validate:
        report = validate_hypotheses(reaction)
        if not report.passed:
            raise PreconditionViolated(f"reaction fails hypotheses: {sorted(report.tags())}")
    lam = principal_eigenvalue(potential_problem(reaction.perturbation, h=h), tol)
    c0 = front.speed if front is not None else solve_front(reaction.base, settings).speed
    ratio = lam / (c0 * c0)
    return RegimeReport(lam, c0, ratio, regime_of(ratio, margin), margin)


def amplitude_for_ratio(half_width: float, c0: float, ratio: float, h: float = 0.01, tol: float = 1e-10,
                        rel_tol: float = 1e-6) -> float:
    """Square-well amplitude ``A`` with ``lambda(A)/c0^2 = ratio`` (bisection; ``lambda`` increases with ``A``)."""
    from .reactions import square_well_perturbation

    target = ratio * c0 * c0

    def lam(A):
        return principal_eigenvalue(potential_problem(square_well_perturbation(A, half_width), h=h), tol)

    lo, hi = 0.0, max(target, 1e-3)
    while lam(hi) < target:
        lo, hi = hi, 2.0 * hi
    while hi - lo > rel_tol * hi:
        mid = 0.5 * (lo + hi)
        if lam(mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# output helpers


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    return obj


def write_json(path, obj) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(_plain(obj), fh, sort_keys=True, indent=2)
        fh.write("\n")


def write_csv(path, header, rows) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])


def _map(fn, items, workers: int):
    items = list(items)
    if workers > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(items))) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


# ---------------------------------------------------------------------------
# front pipeline


@dataclass(eq=False)
class FrontContext:
    cfg: ExperimentConfig
    reaction: object
    front: TravelingFront
    regime: RegimeReport
    eps: float
    lambda_eps: float
    sub: object
    sup: object
    sup_pos: object
    x_left: float
    x_right: float
    forward_time: float
    slack: float
    grid_speed: float


_CONTEXTS: dict = {}


def _key(cfg: ExperimentConfig) -> str:
    return json.dumps(_plain(cfg.resolved()), sort_keys=True)


def front_context(cfg: ExperimentConfig) -> FrontContext:
    """Front, regime, boosted eigenpair, candidates and the common grid for a configuration."""
    key = _key(cfg)
    if key in _CONTEXTS:
        return _CONTEXTS[key]
    g, e = cfg.grid, cfg.experiment
    reaction = build_reaction(cfg)
    tf = solve_front(reaction.base, front_settings(cfg))
    regime = classify_regime(reaction, g["eigen_h"], e["regime_margin"], g["eigen_tol"], front=tf)
    if regime.regime != SUBCRITICAL:
        raise PreconditionViolated(f"front pipeline needs a subcritical reaction, got {regime.regime} "
                                   f"(lambda/c0^2 = {regime.ratio:.4g})")
    c0 = tf.speed
    eps, pair = select_boost(reaction.perturbation, c0, h=g["eigen_h"], tol=g["eigen_tol"])
    sup = make_super_neg_t(tf, pair, reaction, eps)
    y0 = sup.constants["y0"]
    sub = make_sub_neg_t(tf, reaction, y0)
    sup_pos = make_super_pos_t(tf, reaction)
    h, T = g["h"], max(e["horizons"])
    forward = e.get("forward_time") or max(T, 2.0 * (y0 + reaction.L + 20.0) / c0)
    x_left = -h * math.ceil((c0 * T + y0 + g["margin"]) / h)
    x_right = h * math.ceil((g["margin"] + c0 * forward + reaction.L) / h)
    ctx = FrontContext(cfg, reaction, tf, regime, eps, sup.constants["lambda_eps"], sub, sup, sup_pos,
                       x_left, x_right, forward, sandwich_slack(h, g["dt"], tf.curvature_scale()),
                       grid_front_speed(tf, h, g["dt"]))
    _CONTEXTS[key] = ctx
    return ctx


def grid_front_speed(tf: TravelingFront, h: float, dt: float, t_run: float = 60.0) -> float:
    """Speed of the discrete front of ``u_t = u_xx + f0(u)`` on the scheme's grid.

    It differs from ``c0`` by ``O(h^2 + dt^2)``; launching horizon runs at the
    position this speed implies keeps the grid lag from accumulating with ``T``.
    """
    from .reactions import compose_reaction, square_well_perturbation

    homogeneous = compose_reaction(tf.reaction, square_well_perturbation(0.0, 1.0), 0.5 * tf.reaction.theta0,
                                   name="homogeneous")
    init = GridFunction.sample(tf, -40.0, h * math.ceil((40.0 + tf.speed * t_run) / h), h)
    traj = run_cauchy(CauchyProblem(homogeneous, init, dt), t_run, 10, (0.5,), keep_snapshots=False)
    return global_mean_speed(traj, 5.0).speed


def _time_monotone(traj, tol):
    worst = math.inf
    for a, b in zip(traj.snapshots, traj.snapshots[1:]):
        worst = min(worst, float(np.min(b.values - a.values)))
    return worst >= -tol, worst


def _front_horizon(job):
    resolved, T = job
    cfg = ExperimentConfig(**resolved)
    ctx = front_context(cfg)
    g, e = cfg.grid, cfg.experiment
    v, w, wt, r = ctx.sub, ctx.sup, ctx.sup_pos, ctx.reaction
    xl, xr = ctx.x_left, ctx.x_right
    bl = Dirichlet(lambda t: float(v(t, xl)))
    br = Dirichlet(lambda t: float(v(t, xr)))
    t_launch = -T * ctx.grid_speed / ctx.front.speed
    init = GridFunction.sample(lambda x: v(t_launch, x), xl, xr, g["h"])
    stride, mus = e["snapshot_stride"], e["mu_list"]
    back = run_cauchy(CauchyProblem(r, init, g["dt"], bl, br, t0=-T), 0.0, stride, mus)
    u0 = back.snapshots[-1]
    t_fwd = ctx.forward_time if T == max(e["horizons"]) else T
    fwd = run_cauchy(CauchyProblem(r, u0, g["dt"], bl, br, t0=0.0), t_fwd, stride, mus)

    neg = check_sandwich(back, v, w, ctx.slack)
    upto_T = _truncate(fwd, T)
    pos = check_sandwich(upto_T, None, wt, ctx.slack)
    handoff = float(np.min(wt(0.0, u0.x) - np.minimum(1.0, w(0.0, u0.x))))
    mono_b, worst_b = _time_monotone(back, e["monotone_tol"])
    mono_f, worst_f = _time_monotone(fwd, e["monotone_tol"])
    # a time-monotone solution also satisfies u(0) >= u(-dt) at the handoff, covered by the back run
    widths = {}
    for mu in mus:
        vals = []
        for tr in (back, fwd):
            ok = tr.attained[mu].all(axis=1)
            vals.extend(tr.positions[mu][ok, 2].tolist())
        widths[mu] = max(vals) if vals else math.inf
    nested = True
    ordered = sorted(mus)
    for tr in (back, fwd):
        for a, b in zip(ordered, ordered[1:]):
            both = tr.attained[a].all(axis=1) & tr.attained[b].all(axis=1)
            nested &= bool(np.all(tr.positions[b][both, 2] <= tr.positions[a][both, 2] + 1e-12))
    return {
        "T": T,
        "sandwich_neg": asdict(neg),
        "sandwich_pos": asdict(pos),
        "handoff_margin": handoff,
        "monotone": bool(mono_b and mono_f),
        "monotone_worst": min(worst_b, worst_f),
        "max_width": widths,
        "nested_widths": nested,
        "u0": np.array(u0.values),
        "times": np.concatenate([back.times, fwd.times[1:]]),
        "X": np.concatenate([back.level_half, fwd.level_half[1:]]),
        "breach": bool(back.breach or fwd.breach),
        "diagnostics": (back, fwd),
    }


def _truncate(traj, t_end):
    from copy import copy

    keep = traj.times <= t_end + 1e-9
    out = copy(traj)
    out.times = traj.times[keep]
    out.snapshots = [s for s, k in zip(traj.snapshots, keep) if k]
    return out


def _drift_tv(times, X, c0, start):
    sel = times >= start - 1e-12
    d = X[sel] - c0 * times[sel]
    return float(np.sum(np.abs(np.diff(d)))), float(np.max(np.abs(d - d[0]))) if d.size else 0.0


def front_pipeline(cfg: ExperimentConfig, out_dir=None) -> dict:
    """Finite-horizon construction of a transition front between explicit sub- and super-solutions."""
    ctx = front_context(cfg)
    e = cfg.experiment
    horizons = list(e["horizons"])
    results = _map(_front_horizon, [(cfg.resolved(), T) for T in horizons], e["workers"])
    c0 = ctx.front.speed

    sandwich_ok = all(r["sandwich_neg"]["passed"] and r["sandwich_pos"]["passed"] and r["handoff_margin"] >= 0.0
                      for r in results)
    monotone_ok = all(r["monotone"] for r in results)
    analytic = {mu: ctx.front.width(mu) for mu in e["mu_list"]}
    width_sup = {mu: max(r["max_width"][mu] for r in results) for mu in e["mu_list"]}
    width_ok = all(width_sup[mu] <= e["width_factor"] * analytic[mu] for mu in e["mu_list"])
    nested = all(r["nested_widths"] for r in results)

    longest = results[-1]
    back, fwd = longest["diagnostics"]
    from .pde import Trajectory

    joined = Trajectory(longest["times"], [], (), {}, {}, longest["X"], np.array([]), np.array([]),
                        back.h, back.dt)
    speed = global_mean_speed(joined, e["t_min_gap"])
    speed_ok = abs(speed.speed / c0 - 1.0) <= e["speed_rel_tol"]
    t0, t1 = longest["times"][0], longest["times"][-1]
    tv, spread = _drift_tv(longest["times"], longest["X"], c0, 0.5 * (t0 + t1))
    drift_ok = tv < e["drift_tv_max"]

    d = [float(np.max(np.abs(a["u0"] - b["u0"]))) for a, b in zip(results, results[1:])]
    cauchy_ok = all(x > y for x, y in zip(d, d[1:])) if len(d) >= 2 else True

    checks = {
        "sandwich": sandwich_ok,
        "time_monotone": monotone_ok,
        "bounded_width": width_ok and nested,
        "mean_speed": speed_ok,
        "bounded_drift": drift_ok,
        "cauchy_at_t0": cauchy_ok,
    }
    report = {
        "pipeline": "front",
        "config": cfg.resolved(),
        "regime": ctx.regime.as_dict(),
        "c0": c0,
        "front_residual": ctx.front.residual,
        "eps": ctx.eps,
        "lambda_eps": ctx.lambda_eps,
        "constants": {"sub_neg": ctx.sub.constants, "super_neg": ctx.sup.constants,
                      "super_pos": ctx.sup_pos.constants},
        "grid": {"x_left": ctx.x_left, "x_right": ctx.x_right, "forward_time": ctx.forward_time},
        "slack": ctx.slack,
        "grid_front_speed": ctx.grid_speed,
        "horizons": [{k: v for k, v in r.items() if k not in ("u0", "times", "X", "diagnostics")} for r in results],
        "analytic_width": analytic,
        "max_width": width_sup,
        "speed": speed._asdict(),
        "drift_total_variation": tv,
        "drift_spread": spread,
        "cauchy_differences": d,
        "checks": checks,
        "passed": all(checks.values()),
    }
    if out_dir is not None:
        out = Path(out_dir)
        for r in results:
            b, f = r["diagnostics"]
            for name, tr in (("back", b), ("forward", f)):
                header, rows = tr.diagnostics_rows()
                write_csv(out / "runs" / f"T_{r['T']:g}" / f"diagnostics_{name}.csv", header, rows)
            snap = b.snapshots[-1]
            write_csv(out / "runs" / f"T_{r['T']:g}" / "u_t0.csv", ["x", "u"], zip(snap.x, snap.values))
    return report


# ---------------------------------------------------------------------------
# bump pipeline


def bump_pipeline(cfg: ExperimentConfig, out_dir=None) -> dict:
    """Forward evolution of the explicit bump ``zeta e^{lam t} psi`` and the drift diagnostic."""
    g, e = cfg.grid, cfg.experiment
    reaction = build_reaction(cfg)
    if reaction.exact_linear_zone is None:
        raise PreconditionViolated("bump pipeline needs a reaction with an exact linear zone")
    tf = solve_front(reaction.base, front_settings(cfg))
    regime = classify_regime(reaction, g["eigen_h"], e["regime_margin"], g["eigen_tol"], front=tf)
    if regime.regime != SUPERCRITICAL:
        raise PreconditionViolated(f"bump pipeline needs a supercritical reaction, got {regime.regime}")
    zeta, L, h, dt = reaction.exact_linear_zone, reaction.L, g["h"], g["dt"]
    R = h * math.ceil((L + e["bump_radius"]) / h)
    pair = principal_eigenpair(potential_problem(reaction.perturbation, h=h, truncation_radius=R), g["eigen_tol"])
    lam, rate = pair.lam, math.sqrt(pair.lam)
    t_start = math.log(e["bump_start_fraction"]) / lam
    init = entire_bump_state(pair, zeta, t_start)
    zero = Dirichlet(0.0)
    stride = e["snapshot_stride"]
    lin = run_cauchy(CauchyProblem(reaction, init, dt, zero, zero, t0=t_start), 0.0, stride, (0.5,))

    rel_errors, rates = [], []
    fit_radius = R - 8.0 / rate
    for t, snap in zip(lin.times, lin.snapshots):
        exact = entire_bump_state(pair, zeta, min(float(t), 0.0)).values
        rel_errors.append(float(np.max(np.abs(snap.values - exact)) / np.max(exact)))
        fit = bump_fit(snap, L + 1.0, fit_radius)
        rates.append((fit.c, fit.bump_like))
    max_rel = max(rel_errors)
    rate_ok = all(bl and abs(c / rate - 1.0) <= e["rate_rel_tol"] for c, bl in rates)

    after = run_cauchy(CauchyProblem(reaction, lin.snapshots[-1], dt, zero, zero, t0=0.0), e["bump_after"],
                       stride, (0.5,), keep_snapshots=True)
    crossed = np.flatnonzero(after.max_value >= reaction.theta0)
    final_fit = None
    try:
        ff = bump_fit(after.snapshots[-1], L + 1.0, fit_radius)
        final_fit = ff._asdict()
    except FrontLabError as exc:
        final_fit = {"error": str(exc)}

    drift = _drift_diagnostic(cfg, reaction, tf)
    series = drift.pop("series")
    checks = {
        "linear_phase_agreement": max_rel <= e["linear_rel_tol"],
        "tail_rate": rate_ok,
    }
    report = {
        "pipeline": "bump",
        "config": cfg.resolved(),
        "regime": regime.as_dict(),
        "lambda_grid": lam,
        "sqrt_lambda": rate,
        "radius": R,
        "t_start": t_start,
        "max_relative_error": max_rel,
        "fitted_rates": [c for c, _ in rates],
        "fit_window": [L + 1.0, fit_radius],
        "after": {
            "t_cross_theta0": float(after.times[crossed[0]]) if crossed.size else None,
            "final_max": float(after.max_value[-1]),
            "final_mass": float(after.mass[-1]),
            "final_fit": final_fit,
        },
        "drift_diagnostic": drift,
        "checks": checks,
        "passed": all(checks.values()),
    }
    if out_dir is not None:
        out = Path(out_dir)
        write_csv(out / "runs" / "bump" / "linear_phase.csv", ["t", "relative_error", "fitted_rate"],
                  [(t, er, c) for t, er, (c, _) in zip(lin.times, rel_errors, rates)])
        header, rows = after.diagnostics_rows()
        write_csv(out / "runs" / "bump" / "diagnostics_after.csv", header, rows)
        for T, (t, d) in series.items():
            write_csv(out / "runs" / "drift" / f"T_{T:g}.csv", ["t", "X_minus_c0_t"], zip(t, d))
    return report


def _drift_diagnostic(cfg, reaction, tf):
    """Exploratory: advance of runs started from ``U(x - c0 t + y)`` at ``t = -T`` over that profile at ``t = 0``."""
    g, e = cfg.grid, cfg.experiment
    c0, h = tf.speed, g["h"]
    y = reaction.L + e["drift_shift"]
    v = make_sub_neg_t(tf, reaction, y)
    T = max(e["horizons"])
    xl = -h * math.ceil((c0 * T + y + g["margin"]) / h)
    xr = h * math.ceil((g["margin"] + reaction.L) / h)
    bl = Dirichlet(lambda t: float(v(t, xl)))
    br = Dirichlet(lambda t: float(v(t, xr)))
    reference = tf.inverse(0.5) - y
    rows, series = [], {}
    for T in e["horizons"]:
        init = GridFunction.sample(lambda x: v(-T, x), xl, xr, h)
        tr = run_cauchy(CauchyProblem(reaction, init, g["dt"], bl, br, t0=-T), 0.0, e["snapshot_stride"], (0.5,),
                        keep_snapshots=False)
        detrended = tr.level_half - c0 * tr.times
        series[T] = (tr.times, detrended)
        rows.append({"T": T, "drift_at_t0": float(tr.level_half[-1] - reference),
                     "detrended_start": float(detrended[0]), "detrended_end": float(detrended[-1]),
                     "detrended_spread": float(np.ptp(detrended))})
    drifts = [r["drift_at_t0"] for r in rows]
    return {"runs": rows, "grows_with_T": bool(all(a < b for a, b in zip(drifts, drifts[1:]))),
            "note": "exploratory; no pass/fail", "series": series}


# ---------------------------------------------------------------------------
# certification of all four candidates


def certify_pipeline(cfg: ExperimentConfig, which=("sub-neg", "super-neg", "super-pos", "sub-pos"), box=None) -> dict:
    ctx = front_context(cfg)
    g, e = cfg.grid, cfg.experiment
    cands = {
        "sub-neg": ctx.sub,
        "super-neg": ctx.sup,
        "super-pos": ctx.sup_pos,
        "sub-pos": make_sub_pos_t(ctx.front, ctx.reaction, ctx.sup.constants["y0"]),
    }
    reports = {}
    for name in which:
        c = cands[name]
        if box is None:
            span = e["cert_t_span"]
            t_range = (-span, 0.0) if c.time_domain[1] == 0.0 else (0.0, span)
            x_range = (-e["cert_x_half"], e["cert_x_half"])
            nt, nx = e["cert_nt"], e["cert_nx"]
        else:
            t_range, x_range, nt, nx = (box[0], box[1]), (box[2], box[3]), int(box[4]), int(box[5])
        reports[name] = certify(c, ctx.reaction, t_range, x_range, nt, nx, fd_step=g["fd_step"])
    return {"reports": reports, "constants": {k: c.constants for k, c in cands.items()},
            "passed": all(r.passed for r in reports.values())}


# ---------------------------------------------------------------------------
# sweeps


SWEEP_HEADER = ["index", "parameter", "value", "lambda", "c0", "ratio", "regime", "eps", "lambda_eps",
                "tail_bound_ok", "tail_margin", "error"]


def _sweep_row(job):
    index, resolved, param, value, c0 = job
    cfg = ExperimentConfig(**resolved).with_reaction(**{param: value})
    g, e = cfg.grid, cfg.experiment
    row = {"index": index, "parameter": param, "value": value, "lambda": math.nan, "c0": c0, "ratio": math.nan,
           "regime": "", "eps": e["sweep_eps"], "lambda_eps": math.nan, "tail_bound_ok": False,
           "tail_margin": math.nan, "error": ""}
    try:
        reaction = build_reaction(cfg)
        lam = principal_eigenvalue(potential_problem(reaction.perturbation, h=g["eigen_h"]), g["eigen_tol"])
        row["lambda"], row["ratio"] = lam, lam / (c0 * c0)
        row["regime"] = regime_of(row["ratio"], e["regime_margin"])
        pair = boosted_eigenpair(reaction.perturbation, e["sweep_eps"], h=g["eigen_h"], tol=g["eigen_tol"])
        tb = check_tail_bound(pair, reaction.L)
        row["lambda_eps"], row["tail_bound_ok"], row["tail_margin"] = pair.lam, tb.passed, tb.worst_margin
    except (FrontLabError, ValueError) as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def _lambda_at(cfg, param, value):
    reaction = build_reaction(cfg.with_reaction(**{param: value}))
    return principal_eigenvalue(potential_problem(reaction.perturbation, h=cfg.grid["eigen_h"]), cfg.grid["eigen_tol"])


def sweep(cfg: ExperimentConfig, values=None) -> dict:
    """One regime row per parameter value, in input order, plus the refined critical value."""
    e = cfg.experiment
    values = list(e["sweep_values"] if values is None else values)
    if not values:
        raise GridEmpty("sweep grid is empty")
    param = e["sweep_parameter"]
    c0 = solve_front(build_reaction(cfg).base, front_settings(cfg)).speed
    jobs = [(i, cfg.resolved(), param, float(v), c0) for i, v in enumerate(values)]
    rows = _map(_sweep_row, jobs, e["workers"])

    crossing = None
    for prev, cur in zip(rows, rows[1:]):
        if prev["ratio"] <= 1.0 < cur["ratio"] and cur["value"] > prev["value"]:
            lo, hi = prev["value"], cur["value"]
            while hi - lo > 1e-6 * max(1.0, abs(hi)):
                mid = 0.5 * (lo + hi)
                if _lambda_at(cfg, param, mid) < c0 * c0:
                    lo = mid
                else:
                    hi = mid
            crossing = {"below": prev["value"], "above": cur["value"], "critical": 0.5 * (lo + hi)}
            break
    return {"pipeline": "sweep", "config": cfg.resolved(), "c0": c0, "rows": rows, "crossing": crossing,
            "passed": all(r["tail_bound_ok"] for r in rows if not r["error"]) and not any(r["error"] for r in rows)}


def write_sweep_rows(path, rows) -> None:
    write_csv(path, SWEEP_HEADER, [[r[k] for k in SWEEP_HEADER] for r in rows])


# ---------------------------------------------------------------------------
# top level


def run_experiment(cfg: ExperimentConfig, out_dir) -> dict:
    """Run the configured experiment and write ``summary.json`` (and ``rows.csv``) under ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    kind = cfg.experiment["kind"]
    if kind == "classify":
        reaction = build_reaction(cfg)
        regime = classify_regime(reaction, cfg.grid["eigen_h"], cfg.experiment["regime_margin"],
                                 cfg.grid["eigen_tol"], settings=front_settings(cfg))
        summary = {"pipeline": "classify", "config": cfg.resolved(), "regime": regime.as_dict(), "passed": True}
    elif kind == "front-run":
        summary = front_pipeline(cfg, out)
    elif kind == "sandwich":
        summary = front_pipeline(cfg, out)
        summary["passed"] = summary["checks"]["sandwich"]
    elif kind == "bump-run":
        summary = bump_pipeline(cfg, out)
    elif kind == "certify":
        res = certify_pipeline(cfg)
        summary = {"pipeline": "certify", "config": cfg.resolved(), "constants": res["constants"],
                   "reports": {k: r.as_dict() for k, r in res["reports"].items()}, "passed": res["passed"]}
        for name, r in res["reports"].items():
            write_csv(out / "runs" / name / "worst.csv", ["t", "x", "residual", "tolerance"], r.worst_samples)
    else:
        summary = sweep(cfg)
        write_sweep_rows(out / "rows.csv", summary["rows"])
    write_json(out / "summary.json", summary)
    return summary

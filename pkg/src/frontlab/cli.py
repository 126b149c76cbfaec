"""Command-line entry point ``frontlab``.

Exit codes: 0 when every check passed, 2 when a check failed, 1 on a solver or input error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import harness
from .config import ExperimentConfig, build_reaction, load_config
from .errors import FrontLabError
from .grid import GridFunction
from .pde import CauchyProblem, Dirichlet, bump_fit, global_mean_speed, run_cauchy
from .spectral import potential_problem, principal_eigenpair
from .traveling_front import solve_front, solve_perturbed_front

OK, FAILED, ERROR = 0, 2, 1


def _emit(obj, out: Path | None, name: str):
    text = json.dumps(harness._plain(obj), sort_keys=True, indent=2)
    print(text)
    if out is not None:
        harness.write_json(out / name, obj)


def _spectrum(cfg, args, out):
    reaction = build_reaction(cfg)
    g = cfg.grid
    boost = args.eps or 0.0
    pair = principal_eigenpair(potential_problem(reaction.perturbation, h=g["eigen_h"], boost=boost,
                                                 dirichlet=args.dirichlet), g["eigen_tol"])
    _emit({"lambda": pair.lam, "residual_norm": pair.residual_norm, "eps": boost,
           "grid": {"h": pair.h, "radius": pair.radius}}, out, "spectrum.json")
    harness.write_csv(out / "psi.csv", ["x", "psi"], zip(pair.psi.x, pair.psi.values))
    return OK


def _front_speed(cfg, args, out):
    f0 = build_reaction(cfg).base
    settings = harness.front_settings(cfg)
    tf = solve_front(f0, settings) if args.delta is None else solve_perturbed_front(f0, args.delta, settings)
    _emit({"c0": tf.speed, "residual": tf.residual, "bracket": list(tf.bracket), "delta": args.delta},
          out, "front.json")
    y = np.arange(tf.y_left, -tf.y_left + cfg.grid["ode_step"] / 2, cfg.grid["ode_step"])
    harness.write_csv(out / "profile.csv", ["y", "U"], zip(y, tf(y)))
    return OK


def _simulate(cfg, args, out):
    reaction = build_reaction(cfg)
    g, e = cfg.grid, cfg.experiment
    tf = solve_front(reaction.base, harness.front_settings(cfg))
    regime = harness.classify_regime(reaction, g["eigen_h"], e["regime_margin"], g["eigen_tol"], front=tf,
                                     validate=False)
    h, c0 = g["h"], tf.speed
    shift = reaction.L + e["drift_shift"]
    xl = -h * math.ceil((g["margin"] + shift) / h)
    xr = h * math.ceil((g["margin"] + c0 * args.t_end + reaction.L) / h)
    init = GridFunction.sample(lambda x: tf(x + shift), xl, xr, h)
    p = CauchyProblem(reaction, init, g["dt"], Dirichlet(1.0), Dirichlet(0.0))
    traj = run_cauchy(p, args.t_end, e["snapshot_stride"], e["mu_list"])
    header, rows = traj.diagnostics_rows()
    harness.write_csv(out / "diagnostics.csv", header, rows)
    for k, snap in enumerate(traj.snapshots):
        harness.write_csv(out / "snapshots" / f"t_{k}.csv", ["x", "u"], zip(snap.x, snap.values))
    try:
        speed = global_mean_speed(traj, e["t_min_gap"])._asdict()
    except FrontLabError as exc:
        speed = {"error": str(exc)}
    try:
        fit = bump_fit(traj.snapshots[-1], reaction.L + 1.0)._asdict()
    except FrontLabError as exc:
        fit = {"error": str(exc)}
    summary = {"config": cfg.resolved(), "t_end": args.t_end, "c0": c0, "speed": speed,
               "regime": regime.as_dict(), "final_fit": fit, "bump_like": bool(fit.get("bump_like", False)),
               "flags": {"domain_breach": traj.breach}, "snapshot_times": traj.times}
    harness.write_json(out / "summary.json", summary)
    print(json.dumps(harness._plain({k: v for k, v in summary.items() if k not in ("config", "snapshot_times")}),
                     sort_keys=True, indent=2))
    return OK


def _verify(cfg, args, out):
    box = None
    if args.box:
        box = [float(v) for v in args.box.split(",")]
        if len(box) != 6:
            raise ValueError("--box expects tmin,tmax,xmin,xmax,nt,nx")
    res = harness.certify_pipeline(cfg, which=(args.which,), box=box)
    rep = res["reports"][args.which]
    _emit({**rep.as_dict(), "constants": res["constants"][args.which]}, out, f"{args.which}.json")
    harness.write_csv(out / f"{args.which}_worst.csv", ["t", "x", "residual", "tolerance"], rep.worst_samples)
    return OK if rep.passed else FAILED


def _run(cfg, args, out):
    summary = harness.run_experiment(cfg, out)
    brief = {k: summary[k] for k in ("pipeline", "passed", "checks", "regime", "crossing") if k in summary}
    print(json.dumps(harness._plain(brief), sort_keys=True, indent=2))
    return OK if summary["passed"] else FAILED


def _sweep(cfg, args, out):
    if args.workers is not None:
        cfg.experiment["workers"] = args.workers
    cfg.experiment["kind"] = "sweep"
    return _run(cfg, args, out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="frontlab", description="Transition fronts for perturbed ignition reactions.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="INI file with [reaction], [grid], [experiment] sections")
        p.add_argument("--out", default=None, help="output directory (default: the config's 'out')")
        p.set_defaults(func=func)
        return p

    p = add("spectrum", _spectrum, "principal eigenpair of d2/dx2 + a")
    p.add_argument("--dirichlet", type=float, default=None, metavar="M", help="Dirichlet box half-width")
    p.add_argument("--eps", type=float, default=None, help="boost 2*eps on [-L, L]")
    p = add("front-speed", _front_speed, "traveling front speed and profile")
    p.add_argument("--delta", type=float, default=None, help="solve for the perturbed reaction f_delta")
    p = add("simulate", _simulate, "forward Cauchy run from a shifted front")
    p.add_argument("--t-end", type=float, required=True)
    p = add("verify-supersub", _verify, "certify one sub/super-solution candidate")
    p.add_argument("--which", required=True, choices=["sub-neg", "super-neg", "super-pos", "sub-pos"])
    p.add_argument("--box", default=None, help="tmin,tmax,xmin,xmax,nt,nx")
    add("run", _run, "run the configured experiment")
    p = add("sweep", _sweep, "regime sweep over amplitude or half_width")
    p.add_argument("--workers", type=int, default=None)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse uses 2 for usage errors; 2 is reserved for failed checks here
        return ERROR if exc.code else OK
    try:
        cfg = load_config(args.config) if args.config else ExperimentConfig()
        out = Path(args.out if args.out is not None else cfg.experiment["out"])
        out.mkdir(parents=True, exist_ok=True)
        return args.func(cfg, args, out)
    except (FrontLabError, ValueError, FileNotFoundError) as exc:
        print(f"frontlab: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return ERROR


if __name__ == "__main__":
    sys.exit(main())

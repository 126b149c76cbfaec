"""INI experiment configuration with sections ``[reaction]``, ``[grid]`` and ``[experiment]``."""
from __future__ import annotations

import configparser
import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .reactions import (
    IgnitionReaction,
    MixedReaction,
    build_quenched_well,
    build_square_well,
    compose_reaction,
    quadratic_ignition,
    tabulated_ignition,
    tabulated_perturbation,
)

REACTION_DEFAULTS = {
    "kind": "square_well",
    "base": "quadratic",
    "theta0": 0.25,
    "amplitude": 0.1,
    "half_width": 1.0,
    "zeta": 0.1,
}

GRID_DEFAULTS = {
    "h": 0.05,
    "dt": 0.01,
    "eigen_h": 0.01,
    "eigen_tol": 1e-10,
    "ode_step": 0.01,
    "speed_tol": 1e-10,
    "fd_step": 0.01,
    "margin": 40.0,
}

EXPERIMENT_DEFAULTS = {
    "kind": "front-run",
    "seed": 0,
    "regime_margin": 0.05,
    "horizons": [10.0, 20.0, 40.0],
    "mu_list": [0.1, 0.25, 0.45],
    "snapshot_stride": 10,
    "width_factor": 1.5,
    "speed_rel_tol": 0.02,
    "drift_tv_max": 2.0,
    "t_min_gap": 5.0,
    "monotone_tol": 1e-10,
    "linear_rel_tol": 0.01,
    "rate_rel_tol": 0.1,
    "bump_radius": 30.0,
    "bump_start_fraction": 0.05,
    "bump_after": 30.0,
    "drift_shift": 5.0,
    "cert_t_span": 20.0,
    "cert_x_half": 50.0,
    "cert_nt": 101,
    "cert_nx": 1001,
    "sweep_parameter": "amplitude",
    "sweep_values": [],
    "sweep_eps": 0.1,
    "workers": 1,
    "out": "frontlab_out",
}

_LISTS = {"horizons", "mu_list", "sweep_values", "u_samples", "f_samples", "x_samples", "a_samples"}
_INTS = {"seed", "snapshot_stride", "cert_nt", "cert_nx", "workers"}
_STRINGS = {"kind", "base", "sweep_parameter", "f0_table", "a_table", "name", "out"}


def _parse_value(key: str, raw: str):
    raw = raw.strip()
    if key in _LISTS:
        return [float(v) for v in raw.replace(",", " ").split()]
    if key in _INTS:
        return int(raw)
    if key in _STRINGS:
        return raw
    return float(raw)


@dataclass
class ExperimentConfig:
    reaction: dict = field(default_factory=dict)
    grid: dict = field(default_factory=dict)
    experiment: dict = field(default_factory=dict)
    source: str | None = None

    def __post_init__(self):
        defaults = dict(REACTION_DEFAULTS)
        if self.reaction.get("kind") == "table":
            # a tabulated perturbation carries its own support and size
            defaults.pop("amplitude")
            defaults.pop("half_width")
        self.reaction = {**defaults, **self.reaction}
        self.grid = {**GRID_DEFAULTS, **self.grid}
        self.experiment = {**EXPERIMENT_DEFAULTS, **self.experiment}
        self._check()

    def _check(self):
        kind = self.reaction["kind"]
        if kind not in ("square_well", "table", "quenched_well"):
            raise ValueError(f"unknown reaction kind {kind!r}")
        if self.reaction["base"] not in ("quadratic", "table"):
            raise ValueError(f"unknown base reaction {self.reaction['base']!r}")
        for key in ("f0_table", "a_table"):
            if key in self.reaction and not Path(self.reaction[key]).is_file():
                raise FileNotFoundError(f"{key} file {self.reaction[key]!r} does not exist")
        for key in ("h", "dt", "eigen_h", "ode_step", "fd_step"):
            if self.grid[key] <= 0:
                raise ValueError(f"grid setting {key} must be positive")
        exp = self.experiment
        if exp["kind"] not in ("classify", "front-run", "bump-run", "sandwich", "certify", "sweep"):
            raise ValueError(f"unknown experiment kind {exp['kind']!r}")
        if exp["kind"] == "sweep" and exp["sweep_parameter"] not in ("amplitude", "half_width"):
            raise ValueError("sweeps vary 'amplitude' or 'half_width'")
        if sorted(exp["horizons"]) != list(exp["horizons"]) or len(exp["horizons"]) < 1:
            raise ValueError("horizons must be listed in increasing order")

    def with_reaction(self, **changes) -> ExperimentConfig:
        return ExperimentConfig({**self.reaction, **changes}, dict(self.grid), dict(self.experiment), self.source)

    def resolved(self) -> dict:
        return {"reaction": dict(self.reaction), "grid": dict(self.grid), "experiment": dict(self.experiment)}


def load_config(path) -> ExperimentConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    with open(path) as fh:
        parser.read_file(fh)
    sections = {}
    for name in ("reaction", "grid", "experiment"):
        sections[name] = {k: _parse_value(k, v) for k, v in parser[name].items()} if parser.has_section(name) else {}
    base = Path(path).resolve().parent
    for key in ("f0_table", "a_table"):
        if key in sections["reaction"]:
            p = Path(sections["reaction"][key])
            sections["reaction"][key] = str(p if p.is_absolute() else base / p)
    return ExperimentConfig(sections["reaction"], sections["grid"], sections["experiment"], str(path))


def _read_table(path):
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].lstrip().startswith("#")]
    try:
        data = np.array([[float(v) for v in r[:2]] for r in rows])
    except ValueError:
        data = np.array([[float(v) for v in r[:2]] for r in rows[1:]])
    return data[:, 0], data[:, 1]


def build_base(cfg: ExperimentConfig) -> IgnitionReaction:
    r = cfg.reaction
    if r["base"] == "quadratic":
        f0 = quadratic_ignition(r["theta0"])
        if "theta1" in r:
            f0 = IgnitionReaction(f0.theta0, r["theta1"], f0.lipschitz, f0.evaluator, peak=f0.peak,
                                  top_slope=f0.top_slope, name=f0.name)
        return f0
    if "f0_table" in r:
        u, f = _read_table(r["f0_table"])
    else:
        u, f = r["u_samples"], r["f_samples"]
    return tabulated_ignition(u, f, r["theta0"], r["theta1"])


def build_reaction(cfg: ExperimentConfig) -> MixedReaction:
    r = cfg.reaction
    f0 = build_base(cfg)
    if r["kind"] == "square_well":
        reaction = build_square_well(f0, r["amplitude"], r["half_width"], r["zeta"])
    elif r["kind"] == "quenched_well":
        reaction = build_quenched_well(f0, r["amplitude"], r["half_width"], r["zeta"])
    else:
        if "a_table" in r:
            xs, a_s = _read_table(r["a_table"])
        else:
            xs, a_s = r["x_samples"], r["a_samples"]
        reaction = compose_reaction(f0, tabulated_perturbation(xs, a_s, r.get("half_width")), r["zeta"], name="table")
    if "gamma" in r:
        if r["gamma"] < reaction.lipschitz:
            raise ValueError(f"gamma={r['gamma']} is below the Lipschitz bound {reaction.lipschitz}")
        reaction = MixedReaction(reaction.base, reaction.perturbation, reaction.evaluator, r["gamma"],
                                 reaction.exact_linear_zone, reaction.zeta_table, reaction.name, reaction.components)
    return reaction

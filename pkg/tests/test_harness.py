import json

import numpy as np
import pytest

from conftest import well_eigenvalue
from frontlab.config import ExperimentConfig
from frontlab.errors import GridEmpty, PreconditionViolated
from frontlab.harness import (
    NEAR_CRITICAL,
    SUBCRITICAL,
    SUPERCRITICAL,
    amplitude_for_ratio,
    bump_pipeline,
    classify_regime,
    regime_of,
    run_experiment,
    sweep,
    write_csv,
    write_json,
)
from frontlab.reactions import build_square_well


def test_regime_of():
    assert regime_of(0.5) == SUBCRITICAL
    assert regime_of(0.97) == NEAR_CRITICAL
    assert regime_of(1.04) == NEAR_CRITICAL
    assert regime_of(1.2) == SUPERCRITICAL


def test_classify_default(default_reaction, default_front):
    rep = classify_regime(default_reaction, front=default_front)
    assert rep.regime == SUBCRITICAL
    assert rep.lam == pytest.approx(well_eigenvalue(0.1, 1.0), abs=1e-4)


def test_classify_supercritical(f0, default_front):
    rep = classify_regime(build_square_well(f0, 1.3, 1.0, 0.1), front=default_front)
    assert rep.regime == SUPERCRITICAL
    assert rep.ratio == pytest.approx(2.0, abs=0.01)


def test_amplitude_for_ratio(default_front):
    c0 = default_front.speed
    A = amplitude_for_ratio(1.0, c0, 1.0, h=0.02)
    # independent: the well eigenvalue at that amplitude equals c0^2
    assert well_eigenvalue(A, 1.0) == pytest.approx(c0 * c0, rel=1e-3)


def test_sweep_rows_ordered_and_crossing():
    cfg = ExperimentConfig({}, {"eigen_h": 0.02}, {"kind": "sweep", "sweep_values": [1.2, 0.2, 0.6, 1.0]})
    res = sweep(cfg)
    assert [r["value"] for r in res["rows"]] == [1.2, 0.2, 0.6, 1.0]
    assert all(r["tail_bound_ok"] for r in res["rows"])
    assert res["crossing"] is not None
    assert 0.6 < res["crossing"]["critical"] < 1.0
    c0 = res["c0"]
    assert well_eigenvalue(res["crossing"]["critical"], 1.0) == pytest.approx(c0 * c0, rel=2e-3)


def test_sweep_records_row_errors():
    cfg = ExperimentConfig({}, {"eigen_h": 0.02}, {"kind": "sweep", "sweep_values": [0.4, -1.0]})
    res = sweep(cfg)
    assert res["rows"][0]["error"] == ""
    assert "ValueError" in res["rows"][1]["error"]
    assert not res["passed"]


def test_sweep_empty_grid():
    with pytest.raises(GridEmpty):
        sweep(ExperimentConfig({}, {}, {"kind": "sweep", "sweep_values": []}))


def test_sweep_parallel_matches_serial():
    base = {"kind": "sweep", "sweep_values": [0.2, 0.9, 1.5]}
    serial = sweep(ExperimentConfig({}, {"eigen_h": 0.02}, {**base, "workers": 1}))
    parallel = sweep(ExperimentConfig({}, {"eigen_h": 0.02}, {**base, "workers": 2}))
    assert serial["rows"] == parallel["rows"]


def test_front_pipeline_needs_subcritical():
    cfg = ExperimentConfig({"amplitude": 1.3}, {}, {"kind": "front-run"})
    with pytest.raises(PreconditionViolated):
        run_experiment(cfg, "/tmp/never-written")


def test_bump_pipeline_needs_supercritical():
    with pytest.raises(PreconditionViolated):
        bump_pipeline(ExperimentConfig({}, {}, {"kind": "bump-run"}))


def test_outputs_are_deterministic(tmp_path):
    obj = {"b": np.float64(1.5), "a": [np.int64(2), np.array([0.1, 0.2])], "c": {"z": True, "y": float("inf")}}
    write_json(tmp_path / "one.json", obj)
    write_json(tmp_path / "two.json", dict(reversed(list(obj.items()))))
    assert (tmp_path / "one.json").read_text() == (tmp_path / "two.json").read_text()
    data = json.loads((tmp_path / "one.json").read_text())
    assert list(data) == ["a", "b", "c"]
    write_csv(tmp_path / "r.csv", ["x", "y"], [(0.1, 1), (np.float64(1 / 3), 2)])
    assert (tmp_path / "r.csv").read_text().splitlines()[2] == "0.3333333333333333,2"


def test_classify_experiment_writes_summary(tmp_path):
    cfg = ExperimentConfig({}, {"eigen_h": 0.02}, {"kind": "classify"})
    first = run_experiment(cfg, tmp_path / "a")
    run_experiment(cfg, tmp_path / "b")
    assert (tmp_path / "a" / "summary.json").read_text() == (tmp_path / "b" / "summary.json").read_text()
    assert first["config"]["grid"]["eigen_h"] == 0.02


def test_trivial_perturbation_is_subcritical(f0, default_front):
    rep = classify_regime(build_square_well(f0, 0.0, 1.0, 0.1), front=default_front)
    assert rep.lam == 0.0 and rep.regime == SUBCRITICAL


def test_bisected_amplitude_gives_twice_critical(f0, default_front):
    c0 = default_front.speed
    A = amplitude_for_ratio(1.0, c0, 2.0, h=0.02)
    # transcendental root at that amplitude
    assert 1.9 <= well_eigenvalue(A, 1.0) / c0**2 <= 2.1
    assert classify_regime(build_square_well(f0, A, 1.0, 0.1), front=default_front).regime == SUPERCRITICAL


def test_tuned_amplitude_is_near_critical(f0, default_front):
    A = amplitude_for_ratio(1.0, default_front.speed, 1.02, h=0.02)
    assert classify_regime(build_square_well(f0, A, 1.0, 0.1), front=default_front).regime == NEAR_CRITICAL


def test_sweep_lambda_non_decreasing():
    values = [0.2 * k for k in range(11)]
    res = sweep(ExperimentConfig({}, {"eigen_h": 0.02}, {"kind": "sweep", "sweep_values": values}))
    lam = [r["lambda"] for r in res["rows"]]
    assert all(a <= b for a, b in zip(lam, lam[1:]))
    assert res["rows"][0]["regime"] == SUBCRITICAL and res["rows"][-1]["regime"] == SUPERCRITICAL

import numpy as np
import pytest

from frontlab.reactions import (
    build_quenched_well,
    build_square_well,
    compose_reaction,
    linear_zone_profile,
    perturb_ignition,
    quadratic_ignition,
    square_well_perturbation,
    step_ignition,
    tabulated_ignition,
    tabulated_perturbation,
    validate_hypotheses,
    validate_ignition,
)


def test_quadratic_vanishes_below_threshold_and_at_one(f0):
    u = np.array([0.0, 0.1, 0.25, 1.0])
    assert np.all(f0(u) == 0.0)
    assert f0(0.5) == pytest.approx(0.25 * 0.5)


def test_quadratic_lipschitz_bound(f0):
    u = np.linspace(0, 1, 10001)
    slopes = np.abs(np.diff(f0(u))) / np.diff(u)
    assert slopes.max() <= f0.lipschitz + 1e-12
    assert f0.lipschitz == pytest.approx(0.75)


def test_step_ignition_has_jump():
    f = step_ignition(0.25)
    assert not f.continuous
    assert f(0.2499) == 0.0
    assert f(0.25) == pytest.approx(0.75)


def test_linear_zone_profile_shape():
    g = linear_zone_profile(0.1)
    u = np.array([0.0, 0.05, 0.1, 0.55, 1.0])
    np.testing.assert_allclose(g(u), [0.0, 0.05, 0.1, 0.05, 0.0], atol=1e-15)


def test_square_well_is_exactly_linear_in_zone(default_reaction):
    x = np.linspace(-3, 3, 61)
    u = 0.07
    np.testing.assert_allclose(default_reaction(x, u), np.where(np.abs(x) <= 1, 0.1 * u, 0.0))
    assert default_reaction.zeta_of_eps(0.3) == 0.1


def test_square_well_gamma(default_reaction):
    assert default_reaction.lipschitz == pytest.approx(0.75 + 0.1)


def test_default_reaction_satisfies_hypotheses(default_reaction):
    report = validate_hypotheses(default_reaction)
    assert report.passed, report.violations[:5]


def test_validation_flags_bad_zeta(f0):
    # claims a linear zone wider than the one the reaction has
    r = build_square_well(f0, 0.5, 1.0, 0.1)
    from dataclasses import replace

    bad = replace(r, exact_linear_zone=0.2)
    report = validate_hypotheses(bad, eps_list=(0.05,))
    assert "F3" in report.tags()


def test_validation_flags_support_leak(f0):
    a = tabulated_perturbation([-2, 0, 2], [0.0, 1.0, 0.0], half_width=1.0)
    r = compose_reaction(f0, a, 0.1)
    assert "F2" in validate_hypotheses(r).tags()


def test_validate_ignition_positive_part():
    f = tabulated_ignition([0.0, 0.3, 0.6, 1.0], [0.0, 0.0, -0.1, 0.0], 0.3, 0.2)
    assert "F2" in validate_ignition(f).tags()


def test_tabulated_ignition_interpolates():
    f = tabulated_ignition([0.0, 0.3, 0.6, 1.0], [0.0, 0.0, 0.2, 0.0], 0.3, 0.3)
    assert f(0.45) == pytest.approx(0.1)
    assert validate_ignition(f).passed


def test_rejects_bad_parameters(f0):
    with pytest.raises(ValueError):
        square_well_perturbation(-1.0, 1.0)
    with pytest.raises(ValueError):
        compose_reaction(f0, square_well_perturbation(1.0, 1.0), 0.3)
    with pytest.raises(ValueError):
        quadratic_ignition(1.5)
    with pytest.raises(ValueError):
        perturb_ignition(f0, 0.3)


def test_perturbed_ignition_range(f0):
    fd = perturb_ignition(f0, 0.1)
    assert fd.top == pytest.approx(1.1)
    assert fd.theta0 == pytest.approx(0.15)
    u = np.linspace(0, 1.1, 2201)
    assert np.all(fd(u) >= f0(np.clip(u, 0, 1)) - 1e-12)


def test_quenched_well_switches_off_base(f0):
    r = build_quenched_well(f0, 0.1, 3.0, 0.1)
    assert r(0.0, 0.5) == pytest.approx(0.1 * linear_zone_profile(0.1)(0.5))
    assert r(5.0, 0.5) == pytest.approx(f0(0.5))

"""Transition fronts for ignition reactions with a compactly supported perturbation."""
from .comparison import (
    CandidateSolution,
    ResidualReport,
    certify,
    check_sandwich,
    make_sub_neg_t,
    make_sub_pos_t,
    make_super_neg_t,
    make_super_pos_t,
)
from .config import ExperimentConfig, build_reaction, load_config
from .grid import GridFunction
from .harness import bump_pipeline, classify_regime, front_pipeline, run_experiment, sweep
from .pde import CauchyProblem, Dirichlet, NeumannZero, run_cauchy, step
from .reactions import build_square_well, compose_reaction, quadratic_ignition, step_ignition
from .spectral import potential_problem, principal_eigenpair, principal_eigenvalue, select_boost
from .traveling_front import TravelingFront, solve_front, solve_perturbed_front

__version__ = "0.1.0"

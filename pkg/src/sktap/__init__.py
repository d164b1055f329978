"""TAP iteration for the Sherrington-Kirkpatrick model: scalar state evolution,
the conditioning cascade, and Monte Carlo checks of the finite-N predictions."""

__version__ = "0.1.0"

from .scalar_theory import (ATCheck, ModelParams, ScalarTheory, StateEvolution, at_check, psi,
                            psi_interior_fixed_point, psi_prime, solve_q, state_evolution)
from .ensemble import InteractionMatrix, derive_seed, inner, norm, sample_matrix
from .tap_core import (CascadeState, IterateSet, conditioning_step, effective_iterates, run_cascade,
                       tap_iterate, x_vector)
from .harness import ExperimentConfig, TolerancePolicy, run_experiment

__all__ = [
    "ATCheck", "ModelParams", "ScalarTheory", "StateEvolution", "at_check", "psi",
    "psi_interior_fixed_point", "psi_prime", "solve_q", "state_evolution",
    "InteractionMatrix", "derive_seed", "inner", "norm", "sample_matrix",
    "CascadeState", "IterateSet", "conditioning_step", "effective_iterates", "run_cascade",
    "tap_iterate", "x_vector", "ExperimentConfig", "TolerancePolicy", "run_experiment",
]

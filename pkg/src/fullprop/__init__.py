"""Monroe and Chamberlin-Courant committee selection."""

from .algorithms import (
    SamplingPlan,
    SolveResult,
    algorithm_a,
    algorithm_b,
    algorithm_c_cc,
    algorithm_c_monroe,
    algorithm_gm,
    algorithm_p,
    algorithm_r,
    solve,
)
from .assign import (
    brute_force_assignment,
    min_cost_max_flow,
    optimal_capacity_assignment,
    optimal_cc_assignment,
    optimal_monroe_assignment,
)
from .bounds import lambert_w, sample_count, theoretical_bound
from .core import (
    Assignment,
    CapacityFunction,
    PreferenceProfile,
    Rule,
    ScoringFunction,
    borda_psf,
    ideal_satisfaction,
    position,
    satisfaction,
    validate_monroe,
)
from .datagen import (
    MixtureParams,
    UrnParams,
    gen_impartial_culture,
    gen_mallows,
    gen_mallows_mixture,
    gen_urn,
    kendall_tau,
)
from .exact import ExactConfig, exact_solver

__version__ = "0.1.0"

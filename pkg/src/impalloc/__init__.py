"""Importance-weighted lossy storage allocation by restrictive water-filling."""

__version__ = "0.1.0"

from .allocator import (
    Algorithm,
    ClipSets,
    SolverOptions,
    round_plan,
    solve,
    solve_general,
    solve_ideal,
    solve_quantification,
    solve_recursive,
    water_level_bisection,
)
from .analysis import (
    MonotonicityReport,
    TradeoffBounds,
    check_rwre_coeff_monotonicity,
    closed_form_interior_lengths,
    interior_condition,
    max_compressed_size,
    min_storage_for_target_nmim,
    nmim_interior_lengths,
    nmim_interior_prob_interval,
    rwre_bounds,
    sufficient_coeff_range,
    tradeoff_bounds,
)
from .distortion import (
    ErrorReport,
    digit_distortion,
    error_report,
    rwre,
    rwre_interior_closed_form,
    rwre_nmim_closed_form,
)
from .errors import AllocError
from .importance import (
    ImportanceFunctionals,
    collision_mass,
    importance_functionals,
    mim_functional,
    mim_weights,
    nmim_functional,
    nmim_weights,
    renyi2_entropy,
)
from .model import (
    AllocationPlan,
    ClassDistribution,
    ImportanceWeights,
    PerClass,
    StorageConfig,
    SystemKind,
    Unbounded,
    Uniform,
    explicit_weights,
    make_config,
    validate_distribution,
)
from .oracle import (
    OracleReport,
    brute_force_integer,
    grid_refine,
    kkt_certify,
    perturbation_check,
    simulate_digit_truncation,
)

__all__ = [name for name in dir() if not name.startswith("_")]

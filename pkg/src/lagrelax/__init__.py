"""Data-driven Lagrangian relaxation: learn dual multipliers from sampled
mixed-binary programs, with exact dual oracles, closed-form hard families,
theoretical bound calculators, and a reproducible rate-experiment harness."""

from .bounds import (
    BoundReport,
    DUDLEY_CONSTANT,
    RademacherEstimate,
    bound_report,
    covering_bound,
    dudley_bound,
    empirical_rademacher,
    erm_excess_bound,
    sga_bound,
    warmstart_bound,
)
from .dual import (
    DualEval,
    DualSolveConfig,
    DualSolveResult,
    MinNormResult,
    dual_eval,
    min_norm_pi_star,
    solve_dual,
)
from .errors import (
    ConfigError,
    DegenerateFamilyError,
    DimensionError,
    DomainError,
    InfeasibleProblemError,
    UnsupportedProblemError,
)
from .experiments import (
    ExperimentConfig,
    FamilyConfig,
    SlopeFit,
    TrialRecord,
    derive_trial_seed,
    expected_warmstart_excess,
    fit_loglog_slope,
    read_records_csv,
    run_rate_experiment,
    run_trial,
    trial_rng,
    write_records_csv,
)
from .hardfamily import (
    HardFamilySpec,
    KlFanoDiagnostics,
    kl_and_fano,
    max_population_risk,
    objective_variance,
    optimal_multiplier,
    optimal_warmstart,
    population_risk,
    population_risk_rows,
    sample_instance,
    sample_objectives,
    sharpness_gap,
)
from .instances import (
    BoundsCheckReport,
    MilpInstance,
    MultiplierVector,
    ProblemBounds,
    instance_from_dict,
    instance_to_dict,
    load_instance,
    make_restricted_instance,
    save_instance,
    validate_bounds,
)
from .kernels import backend_name
from .learners import (
    LearnedMultipliers,
    SgaConfig,
    erm_learn,
    erm_learn_restricted,
    sga_learn,
    sga_learn_restricted,
    warmstart_learn,
    warmstart_learn_restricted,
)
from .packing import PackingSet, min_pairwise_distance, vg_packing
from .subproblem import (
    OptResult,
    SubproblemSolution,
    solve_opt_bruteforce,
    solve_subproblem,
    solve_subproblem_enumerated,
)
from .vrp import (
    VrpDualState,
    VrpInstance,
    VrpRoutePlan,
    random_vrp_instance,
    vrp_dual_ascent,
    vrp_dual_bound,
    vrp_opt_bruteforce,
    vrp_vehicle_subproblem,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]

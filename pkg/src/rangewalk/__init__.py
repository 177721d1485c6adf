"""Integer-lattice walks, their range statistics, and verification experiments.

The library generates bounded-increment walks on Z^d (seeded stochastic
families plus deterministic tent/spiral constructions), tracks range, extrema,
and return times online, and verifies the inequalities connecting walk speed
to range growth both exactly and by Monte Carlo.
"""

from .analysis import (
    AnalysisReport,
    ClassRAssumptionError,
    ExcursionCheck,
    MemoryGuardError,
    RangeTracker,
    ReturnTimes,
    SpeedSeries,
    TailEstimate,
    analyze_stream,
    arith_checkpoints,
    check_excursion_bound,
    check_maximal_range,
    check_range_sandwich_1d,
    dyadic_checkpoints,
    ratio_series,
    return_times,
    speed_report,
    tail_limit_estimate,
    track_extrema,
    track_range,
)
from .core import (
    CoordinateOverflowError,
    DimensionMismatchError,
    LatticePoint,
    StreamConsumedError,
    WalkMetadata,
    WalkStream,
    step_norm,
    step_norm_sq,
    validate_increment_bound,
    walk_from_path,
)
from .experiments import (
    AggregateReport,
    ExactRangeStats,
    MetricAggregate,
    NoReturnEstimate,
    TrialSpec,
    compare,
    estimate_no_return,
    exact_range_speed,
    run_trials,
    theory_value,
)
from .generators import (
    DegeneratePlanError,
    MarkovIncrementChain,
    ReducibleChainError,
    ZigzagPlan,
    compute_n0,
    gen_birth_death,
    gen_ergodic_walk,
    gen_linear_drift,
    gen_simple_rw,
    gen_spiral2d,
    gen_tau_tent,
    gen_zigzag,
    make_walk,
    mix_seed,
    stationary_distribution,
    zigzag_plan,
)

__version__ = "0.1.0"

__all__ = [
    "AggregateReport",
    "AnalysisReport",
    "ClassRAssumptionError",
    "CoordinateOverflowError",
    "DegeneratePlanError",
    "DimensionMismatchError",
    "ExactRangeStats",
    "ExcursionCheck",
    "LatticePoint",
    "MarkovIncrementChain",
    "MemoryGuardError",
    "MetricAggregate",
    "NoReturnEstimate",
    "RangeTracker",
    "ReducibleChainError",
    "ReturnTimes",
    "SpeedSeries",
    "StreamConsumedError",
    "TailEstimate",
    "TrialSpec",
    "WalkMetadata",
    "WalkStream",
    "ZigzagPlan",
    "analyze_stream",
    "arith_checkpoints",
    "check_excursion_bound",
    "check_maximal_range",
    "check_range_sandwich_1d",
    "compare",
    "compute_n0",
    "dyadic_checkpoints",
    "estimate_no_return",
    "exact_range_speed",
    "gen_birth_death",
    "gen_ergodic_walk",
    "gen_linear_drift",
    "gen_simple_rw",
    "gen_spiral2d",
    "gen_tau_tent",
    "gen_zigzag",
    "make_walk",
    "mix_seed",
    "ratio_series",
    "return_times",
    "run_trials",
    "speed_report",
    "stationary_distribution",
    "step_norm",
    "step_norm_sq",
    "tail_limit_estimate",
    "theory_value",
    "track_extrema",
    "track_range",
    "validate_increment_bound",
    "walk_from_path",
    "zigzag_plan",
]

"""User scheduling for compute-and-forward relaying.

A relay decodes an integer combination of lattice codewords instead of the
messages themselves; the achievable rate depends on how well the integer
vector matches the channel.  This package provides the rate expressions,
exact integer coefficient search, magnitude-window user scheduling with
exhaustive oracles, closed-form sum-rate bounds with their scaling-law
diagnostics, and seeded Monte-Carlo experiments (with CSV/figure output)
over all of it.
"""

from .bounds import (
    BoundParams,
    band_edge,
    band_probability,
    lower_scaling_ratio,
    shortfall_bound,
    sumrate_lower_bound,
    sumrate_upper_bound,
    upper_scaling_ratio,
)
from .coeffs import (
    GuardError,
    align_signs,
    best_sumrate_coeff,
    best_unit_vector,
    enumerate_candidates,
    nonunit_win_bound,
    optimal_coeff,
    tradeoff_objective,
)
from .experiments import (
    ExperimentConfig,
    completion_times,
    run_beta_angle_check,
    run_completion_time,
    run_fixed_a_comparison,
    run_rate_scatter,
    run_sumrate_scatter,
    run_sumrate_vs_L,
    sample_channel,
)
from .ranks import (
    GF2RankTracker,
    RationalRankTracker,
    float_rank,
    gf2_rank,
    rational_rank,
)
from .rates import (
    DEGENERATE_TOL,
    RateResult,
    angle_between,
    computation_rate,
    computation_rate_alpha,
    high_snr_rate,
    log_plus,
    mmse_alpha,
)
from .reporting import Table, to_csv_text, write_csv, write_manifest
from .scheduling import (
    ScheduleResult,
    exhaustive_allones_schedule,
    exhaustive_schedule,
    min_angle_schedule,
    random_schedule,
    sorted_window_schedule,
)

__version__ = "0.1.0"

__all__ = [
    "BoundParams",
    "DEGENERATE_TOL",
    "ExperimentConfig",
    "GF2RankTracker",
    "GuardError",
    "RateResult",
    "RationalRankTracker",
    "ScheduleResult",
    "Table",
    "align_signs",
    "angle_between",
    "band_edge",
    "band_probability",
    "best_sumrate_coeff",
    "best_unit_vector",
    "completion_times",
    "computation_rate",
    "computation_rate_alpha",
    "enumerate_candidates",
    "exhaustive_allones_schedule",
    "exhaustive_schedule",
    "float_rank",
    "gf2_rank",
    "high_snr_rate",
    "log_plus",
    "lower_scaling_ratio",
    "min_angle_schedule",
    "mmse_alpha",
    "nonunit_win_bound",
    "optimal_coeff",
    "random_schedule",
    "rational_rank",
    "run_beta_angle_check",
    "run_completion_time",
    "run_fixed_a_comparison",
    "run_rate_scatter",
    "run_sumrate_scatter",
    "run_sumrate_vs_L",
    "sample_channel",
    "shortfall_bound",
    "sorted_window_schedule",
    "sumrate_lower_bound",
    "sumrate_upper_bound",
    "to_csv_text",
    "upper_scaling_ratio",
    "write_csv",
    "write_manifest",
]

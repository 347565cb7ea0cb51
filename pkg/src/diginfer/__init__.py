"""Directed-information graph inference for finite-alphabet Markov networks.

The package simulates networks of jointly Markov symbol processes,
estimates the causal adjacency by plug-in directed information with
threshold tests, and validates the estimator's chi-squared / Gaussian
asymptotics and the analytic error bounds at desk scale.
"""

__version__ = "0.1.0"

from .errors import (
    ConfigurationError,
    DigInferError,
    DomainError,
    ModelConstructionError,
    SizeGuardError,
)
from .estimate import (
    EdgeStatistic,
    EmpiricalDistribution,
    empirical_block_distribution,
    empirical_entropy,
    log_likelihood_ratio,
    marginalize,
    plug_in_directed_info,
    write_edge_stats_csv,
)
from .estimator import DirectedInfoGraphEstimator
from .graphtest import (
    FiniteSampleBounds,
    TestConfig,
    TestReport,
    calibrate_threshold,
    detection_lower_bound,
    edge_decision,
    false_alarm_upper_bound,
    finite_n_bounds,
    graph_estimate,
    hypothesis_test,
    write_report_json,
)
from .model import (
    DimensionSpec,
    JointMarkovModel,
    StationaryBlockDistribution,
    build_random_model,
    copy_channel_model,
    dimensions,
    exact_directed_info,
    load_model,
    save_model,
    stationary_distribution,
    true_adjacency,
    uniform_independent_model,
)
from .numerics import chi2_cdf, ks_statistic, loglog_slope, q_function, reg_gamma_P
from .simulate import SamplePath, read_symbols_csv, simulate, simulate_replicas, write_path_csv
from .experiments import (
    ExperimentConfig,
    ExperimentResult,
    default_config,
    estimate_sigma,
    figure1_curves,
    run_suite,
)

__all__ = [name for name in dir() if not name.startswith("_")]

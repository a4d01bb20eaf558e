"""Significance testing for recall, precision and F-score differences
between two systems scored on the same test set."""

__version__ = "0.1.0"

from .analytic import (
    DegenerateStatisticError,
    TestResult,
    chi2_2x2,
    matched_pair_t,
    sign_test,
    two_proportion_z,
    two_sample_t,
    wilcoxon_test,
)
from .compare import InvalidCombinationError, compare
from .correlation import (
    CorrelationReport,
    UndefinedCorrelationError,
    combine_sd,
    estimate_r12,
    independence_inflation,
)
from .data import (
    DetailRecord,
    InputError,
    PairedOutcomes,
    ResponseCounts,
    load_counts,
    parse_detail_file,
    summarize,
    to_paired_outcomes,
)
from .metrics import MetricTriple, UndefinedMetricError, metric_difference, metrics_for
from .numerics import PValue
from .randomization import (
    RandomizationPlan,
    RandomizationResult,
    build_plan,
    randomization_test,
    run_trial,
    verify,
)
from .simulation import SimSpec, generate_correlated_pairs, power_study

__all__ = [
    "CorrelationReport",
    "DegenerateStatisticError",
    "DetailRecord",
    "InputError",
    "InvalidCombinationError",
    "MetricTriple",
    "PValue",
    "PairedOutcomes",
    "RandomizationPlan",
    "RandomizationResult",
    "ResponseCounts",
    "SimSpec",
    "TestResult",
    "UndefinedCorrelationError",
    "UndefinedMetricError",
    "build_plan",
    "chi2_2x2",
    "combine_sd",
    "compare",
    "estimate_r12",
    "generate_correlated_pairs",
    "independence_inflation",
    "load_counts",
    "matched_pair_t",
    "metric_difference",
    "metrics_for",
    "parse_detail_file",
    "power_study",
    "randomization_test",
    "run_trial",
    "sign_test",
    "summarize",
    "to_paired_outcomes",
    "two_proportion_z",
    "two_sample_t",
    "verify",
    "wilcoxon_test",
]

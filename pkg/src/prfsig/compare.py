"""Run any test on a count summary by method and metric name."""

from __future__ import annotations

from .analytic import (
    INDEPENDENCE_METHODS,
    TestResult,
    chi2_2x2,
    matched_pair_t,
    sign_test,
    two_proportion_z,
    two_sample_t,
    wilcoxon_test,
)
from .data import ResponseCounts
from .metrics import METRICS, metrics_for
from .randomization import (
    DEFAULT_TRIALS,
    EXACT_THRESHOLD,
    RandomizationResult,
    build_plan,
    randomization_test,
)

__all__ = [
    "ALIASES",
    "InvalidCombinationError",
    "MATCHED_METHODS",
    "compare",
    "default_sidedness",
    "observed_better",
    "resolve_method",
]

ALIASES = {
    "chi2": "chi2_2x2",
    "chi2_2x2": "chi2_2x2",
    "z": "two_proportion_z",
    "two_proportion_z": "two_proportion_z",
    "t": "two_sample_t",
    "two_sample_t": "two_sample_t",
    "mpt": "matched_pair_t",
    "matched_pair_t": "matched_pair_t",
    "sign": "sign",
    "wilcoxon": "wilcoxon",
    "rand": "randomization",
    "randomization": "randomization",
}
MATCHED_METHODS = frozenset({"matched_pair_t", "sign", "wilcoxon"})


class InvalidCombinationError(ValueError):
    """The method cannot be applied to the requested metric or input."""


def resolve_method(name: str) -> str:
    try:
        return ALIASES[name]
    except KeyError:
        raise InvalidCombinationError(
            f"unknown method {name!r}; choose from {', '.join(sorted(ALIASES))}"
        ) from None


def default_sidedness(method: str) -> str:
    return "two" if method == "chi2_2x2" else "one"


def observed_better(counts: ResponseCounts, metric: str) -> int:
    """System with the higher observed ``metric`` (1 on ties or if undefined)."""
    m1 = metrics_for(counts, 1).get(metric)
    m2 = metrics_for(counts, 2).get(metric)
    if m1 is None or m2 is None:
        return 1
    return 1 if m1 >= m2 else 2


def _response_sample(counts: ResponseCounts, system: int) -> list[int]:
    """One 0/1 value per response of ``system``: 1 if it is of interest."""
    return [1] * counts.recalled(system) + [0] * counts.spurious(system)


def compare(
    counts: ResponseCounts,
    method: str,
    metric: str = "recall",
    sidedness: str | None = None,
    *,
    overlap_known: bool = True,
    trials: int = DEFAULT_TRIALS,
    seed: int = 0,
    exact_threshold: int = EXACT_THRESHOLD,
    better: int | None = None,
    workers: int = 1,
) -> TestResult | RandomizationResult:
    """Apply ``method`` to the difference in ``metric`` between the systems.

    Matched-pair methods accept recall only. Independence-assuming methods
    accept recall and precision. Randomization accepts every metric.
    One-sided tests look at the system named by ``better`` (default: the one
    that scored higher) outscoring the other; analytic tests for system 2
    run on the label-swapped counts.
    ``overlap_known=False`` marks counts that only give each system's R and
    S (no shared/exclusive split); only the precision tests that ignore
    pairing can run on them.
    """
    method = resolve_method(method)
    if metric not in METRICS:
        raise InvalidCombinationError(f"unknown metric {metric!r}")
    sidedness = sidedness or default_sidedness(method)
    if method in MATCHED_METHODS and metric != "recall":
        raise InvalidCombinationError(
            f"{method} applies to recall only; use randomization for {metric}"
        )
    if method in INDEPENDENCE_METHODS and metric == "f_score":
        raise InvalidCombinationError(
            f"{method} has no form for the F-score; use randomization"
        )
    if not overlap_known and (method not in INDEPENDENCE_METHODS or metric != "precision"):
        raise InvalidCombinationError(
            f"{method} on {metric} needs the shared/exclusive breakdown, "
            "not just per-system R and S"
        )
    if metric != "precision" and not counts.has_total:
        raise InvalidCombinationError(f"{metric} needs miss_both or total_of_interest")

    if better is None:
        better = observed_better(counts, metric)
    elif better not in (1, 2):
        raise ValueError("better must be 1 or 2")
    if method == "randomization":
        plan = build_plan(counts, metric, sidedness, trials, seed, better=better,
                          exact_threshold=exact_threshold)
        return randomization_test(plan, workers=workers)
    if better == 2:
        counts = counts.swapped()

    r1, r2 = counts.recalled(1), counts.recalled(2)
    s1, s2 = counts.spurious(1), counts.spurious(2)
    total = counts.total_of_interest

    if method == "chi2_2x2":
        if metric == "precision":
            return chi2_2x2(r1, s1, r2, s2, sidedness)
        return chi2_2x2(r1, total - r1, r2, total - r2, sidedness)
    if method == "two_proportion_z":
        if metric == "precision":
            return two_proportion_z(r1, r1 + s1, r2, r2 + s2, sidedness)
        return two_proportion_z(r1, total, r2, total, sidedness)
    if method == "two_sample_t":
        if metric == "precision":
            return two_sample_t(_response_sample(counts, 1), _response_sample(counts, 2), sidedness)
        pairs = counts.paired_outcomes()
        return two_sample_t(pairs.y1, pairs.y2, sidedness)
    if method == "sign":
        return sign_test(counts.c_only1, counts.c_only2, sidedness)
    pairs = counts.paired_outcomes()
    if method == "wilcoxon":
        return wilcoxon_test(pairs.differences, sidedness)
    return matched_pair_t(pairs, sidedness)

"""Stratified-shuffle randomization tests for recall, precision and F-score.

Only responses produced by exactly one system are shuffled; each is
reassigned to system 1 or system 2 with probability 1/2, while responses
shared by both systems stay fixed. A trial qualifies when its metric
difference is at least as large as the observed one (one-sided, oriented
toward the system that did better) or at least as large in magnitude
(two-sided). Comparisons are exact integer arithmetic.

Exact mode enumerates all ``2**n`` assignments and reports ``nc/nt``.
Approximate mode samples ``trials`` assignments and reports the upper bound
``(nc + 1)/(nt + 1)``.

Random bits come from a Philox counter-based generator keyed by the master
seed; trial ``t`` always reads the same stretch of the stream, so counts do
not depend on how trials are split across workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal

import numpy as np

from .analytic import sign_test
from .data import ResponseCounts
from .metrics import (
    METRICS,
    UndefinedMetricError,
    f_from_counts,
    metrics_for,
    precision_from_counts,
)
from .numerics import PValue

__all__ = [
    "DEFAULT_TRIALS",
    "EXACT_THRESHOLD",
    "MAX_EXACT_THRESHOLD",
    "RandomizationPlan",
    "RandomizationResult",
    "VerificationReport",
    "assignment_words",
    "build_plan",
    "derive_seed",
    "randomization_test",
    "run_trial",
    "verify",
]

DEFAULT_TRIALS = 2**20
EXACT_THRESHOLD = 20
MAX_EXACT_THRESHOLD = 30
BLOCK_TRIALS = 2**16
_SEED_MASK = (1 << 64) - 1
_SEED_SALT = 0x9E3779B97F4A7C15


@dataclass(frozen=True)
class RandomizationPlan:
    """Everything a randomization run needs; immutable during the run.

    ``units[j]`` tells whether exclusive response ``j`` is of interest and
    ``original[j]`` whether system 1 produced it. Units are ordered: correct
    responses of system 1, correct of system 2, spurious of system 1,
    spurious of system 2.
    """

    counts: ResponseCounts
    units: np.ndarray
    original: np.ndarray
    shared_correct: int
    shared_spurious: int
    total_of_interest: int | None
    metric: str
    sidedness: Literal["one", "two"]
    better: int
    observed: Fraction
    mode: Literal["exact", "approximate"]
    trials: int
    master_seed: int
    exact_threshold: int = EXACT_THRESHOLD

    @property
    def n_units(self) -> int:
        return int(self.units.size)

    @property
    def n_correct_units(self) -> int:
        return int(self.units.sum())

    @property
    def degenerate(self) -> bool:
        return self.n_units == 0


@dataclass(frozen=True)
class RandomizationResult:
    nc: int
    nt: int
    p: PValue
    metric: str
    sidedness: Literal["one", "two"]
    seed: int
    mode: Literal["exact", "approximate"]
    observed: Fraction
    better: int
    degenerate: bool = False

    @property
    def p_value(self) -> float:
        return self.p.value

    @property
    def standard_error(self) -> float:
        """Monte Carlo standard error of ``nc/nt`` (0 in exact mode)."""
        if self.mode == "exact":
            return 0.0
        q = self.nc / self.nt
        return math.sqrt(q * (1.0 - q) / self.nt)

    def to_dict(self) -> dict:
        return {
            "method": "randomization",
            "metric": self.metric,
            "sidedness": self.sidedness,
            "better": self.better,
            "observed": float(self.observed),
            "observed_exact": f"{self.observed.numerator}/{self.observed.denominator}",
            "nc": self.nc,
            "nt": self.nt,
            "p_value": self.p.value,
            "p_kind": self.p.kind,
            "seed": self.seed,
            "mode": self.mode,
            "degenerate": self.degenerate,
            "assumes_independence": False,
            "convention": (
                "p = nc/nt (exhaustive)" if self.mode == "exact" else "p <= (nc+1)/(nt+1)"
            ) + "; trials with an undefined metric count as qualifying",
        }


def derive_seed(seed: int) -> int:
    """Second-run seed: a fixed XOR, so injective and never equal to ``seed``."""
    return (seed ^ _SEED_SALT) & _SEED_MASK


def _check_seed(seed: int) -> int:
    if isinstance(seed, bool) or int(seed) != seed or not 0 <= seed <= _SEED_MASK:
        raise ValueError(f"seed must be an integer in [0, 2**64), got {seed!r}")
    return int(seed)


def _metric_value(metric: str, recalled: int, spurious: int, total: int | None) -> Fraction | None:
    if metric == "recall":
        return Fraction(recalled, total)
    if metric == "precision":
        return precision_from_counts(recalled, spurious)
    return f_from_counts(recalled, spurious, total)


def build_plan(
    counts: ResponseCounts,
    metric: str = "recall",
    sidedness: Literal["one", "two"] = "one",
    trials: int = DEFAULT_TRIALS,
    seed: int = 0,
    *,
    better: int | None = None,
    exact_threshold: int = EXACT_THRESHOLD,
    mode: Literal["exact", "approximate"] | None = None,
) -> RandomizationPlan:
    """Prepare a randomization run for one metric.

    ``better`` names the system expected to score higher in the one-sided
    test; by default it is the system that did better on the observed data
    (system 1 on a tie). ``mode`` defaults to exact when the number of
    exclusive responses is at most ``exact_threshold``.
    """
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}; expected one of {METRICS}")
    if sidedness not in ("one", "two"):
        raise ValueError(f"sidedness must be 'one' or 'two', got {sidedness!r}")
    if not 0 <= exact_threshold <= MAX_EXACT_THRESHOLD:
        raise ValueError(f"exact_threshold must lie in [0, {MAX_EXACT_THRESHOLD}]")
    if trials < 1:
        raise ValueError("trials must be positive")
    seed = _check_seed(seed)
    if metric != "precision" and not counts.has_total:
        raise UndefinedMetricError(f"{metric} needs miss_both or total_of_interest")
    m1 = metrics_for(counts, 1).get(metric)
    m2 = metrics_for(counts, 2).get(metric)
    if m1 is None or m2 is None:
        raise UndefinedMetricError(f"observed {metric} is undefined for at least one system")
    observed = m1 - m2
    if better is None:
        better = 1 if observed >= 0 else 2
    elif better not in (1, 2):
        raise ValueError("better must be 1 or 2")

    units = np.repeat(
        np.array([True, True, False, False]),
        [counts.c_only1, counts.c_only2, counts.s_only1, counts.s_only2],
    )
    original = np.repeat(
        np.array([True, False, True, False]),
        [counts.c_only1, counts.c_only2, counts.s_only1, counts.s_only2],
    )
    units.setflags(write=False)
    original.setflags(write=False)
    if mode is None:
        mode = "exact" if units.size <= exact_threshold else "approximate"
    elif mode == "exact" and units.size > MAX_EXACT_THRESHOLD:
        raise ValueError(f"exact mode supports at most {MAX_EXACT_THRESHOLD} exclusive responses")
    elif mode not in ("exact", "approximate"):
        raise ValueError(f"unknown mode {mode!r}")
    return RandomizationPlan(
        counts=counts,
        units=units,
        original=original,
        shared_correct=counts.c_both,
        shared_spurious=counts.s_both,
        total_of_interest=counts.total_of_interest,
        metric=metric,
        sidedness=sidedness,
        better=better,
        observed=observed,
        mode=mode,
        trials=trials,
        master_seed=seed,
        exact_threshold=exact_threshold,
    )


def run_trial(plan: RandomizationPlan, assignment) -> Fraction | None:
    """Metric difference (system 1 - system 2) after one reassignment.

    ``assignment[j]`` true sends unit ``j`` to system 1. Returns ``None`` if
    the metric is undefined for either system under this assignment.
    """
    bits = np.asarray(assignment, dtype=bool)
    if bits.shape != plan.units.shape:
        raise ValueError(f"assignment must have length {plan.n_units}")
    correct = plan.units
    k_correct = int(np.sum(bits & correct))
    k_spurious = int(np.sum(bits & ~correct))
    n_correct = plan.n_correct_units
    n_spurious = plan.n_units - n_correct
    m1 = _metric_value(plan.metric, plan.shared_correct + k_correct,
                       plan.shared_spurious + k_spurious, plan.total_of_interest)
    m2 = _metric_value(plan.metric, plan.shared_correct + n_correct - k_correct,
                       plan.shared_spurious + n_spurious - k_spurious, plan.total_of_interest)
    if m1 is None or m2 is None:
        return None
    return m1 - m2


def _qualifying_table(plan: RandomizationPlan) -> np.ndarray:
    """Boolean table indexed by (correct units to system 1, spurious units to system 1)."""
    n_c = plan.n_correct_units
    n_s = plan.n_units - n_c
    kc = np.arange(n_c + 1, dtype=object)[:, None]
    ks = np.arange(n_s + 1, dtype=object)[None, :]
    r1 = plan.shared_correct + kc
    s1 = plan.shared_spurious + ks
    r2 = plan.shared_correct + n_c - kc
    s2 = plan.shared_spurious + n_s - ks
    total = plan.total_of_interest

    def frac(r, s):
        r, s = np.broadcast_arrays(r, s)
        if plan.metric == "recall":
            return r.copy(), np.full(r.shape, total, dtype=object)
        if plan.metric == "precision":
            return r.copy(), r + s
        # F = 2R/(R+S+T); undefined when R == 0
        den = r + s + total
        den = np.where(r == 0, 0, den)
        return 2 * r, den

    n1, d1 = frac(r1, s1)
    n2, d2 = frac(r2, s2)
    undefined = (d1 == 0) | (d2 == 0)
    diff_num = n1 * d2 - n2 * d1
    diff_den = d1 * d2
    p, q = plan.observed.numerator, plan.observed.denominator
    if plan.sidedness == "one":
        sign = 1 if plan.better == 1 else -1
        ok = sign * diff_num * q >= sign * p * diff_den
    else:
        ok = abs(diff_num) * q >= abs(p) * diff_den
    return np.asarray(ok | undefined, dtype=bool)


def _unit_masks(plan: RandomizationPlan, n_words: int) -> tuple[np.ndarray, np.ndarray]:
    correct = np.zeros(n_words, dtype=np.uint64)
    spurious = np.zeros(n_words, dtype=np.uint64)
    for j, is_correct in enumerate(plan.units):
        target = correct if is_correct else spurious
        target[j // 64] |= np.uint64(1) << np.uint64(j % 64)
    return correct, spurious


def _words_per_trial(n_units: int) -> int:
    return max(1, -(-n_units // 64))


def assignment_words(seed: int, start: int, stop: int, n_units: int) -> np.ndarray:
    """Random assignment words for trials ``start..stop-1``.

    Row ``i`` holds trial ``start + i``; bit ``j % 64`` of word ``j // 64``
    sends unit ``j`` to system 1 when set. Trial ``t`` reads words
    ``t*w .. t*w + w - 1`` of the Philox stream keyed by ``seed`` (``w``
    words per trial), so rows depend only on ``(seed, trial index)``.
    """
    w = _words_per_trial(n_units)
    first = start * w
    skip = first % 4
    gen = np.random.Philox(key=_check_seed(seed), counter=first // 4)
    raw = gen.random_raw(skip + (stop - start) * w)[skip:]
    return raw.reshape(stop - start, w)


def _count_sampled(plan: RandomizationPlan, table: np.ndarray, seed: int,
                   start: int, stop: int) -> int:
    cmask, smask = _unit_masks(plan, _words_per_trial(plan.n_units))
    raw = assignment_words(seed, start, stop, plan.n_units)
    kc = np.bitwise_count(raw & cmask).sum(axis=1, dtype=np.int64)
    ks = np.bitwise_count(raw & smask).sum(axis=1, dtype=np.int64)
    return int(table[kc, ks].sum())


def _count_enumerated(plan: RandomizationPlan, table: np.ndarray, start: int, stop: int) -> int:
    cmask, smask = _unit_masks(plan, 1)
    a = np.arange(start, stop, dtype=np.uint64)
    kc = np.bitwise_count(a & cmask[0]).astype(np.int64)
    ks = np.bitwise_count(a & smask[0]).astype(np.int64)
    return int(table[kc, ks].sum())


def _blocks(total: int, size: int = BLOCK_TRIALS):
    return [(lo, min(lo + size, total)) for lo in range(0, total, size)]


def randomization_test(
    plan: RandomizationPlan, *, workers: int = 1, seed: int | None = None
) -> RandomizationResult:
    """Run the plan and count qualifying trials.

    ``workers`` threads share the fixed trial blocks; the count is the same
    for any worker number. ``seed`` overrides the plan's master seed.
    """
    if workers < 1:
        raise ValueError("workers must be positive")
    seed = plan.master_seed if seed is None else _check_seed(seed)
    table = _qualifying_table(plan)
    if plan.mode == "exact":
        nt = 2**plan.n_units
        jobs = [(_count_enumerated, (plan, table, lo, hi)) for lo, hi in _blocks(nt)]
    else:
        nt = plan.trials
        jobs = [(_count_sampled, (plan, table, seed, lo, hi)) for lo, hi in _blocks(nt)]

    if workers == 1 or len(jobs) == 1:
        nc = sum(fn(*args) for fn, args in jobs)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            nc = sum(pool.map(lambda job: job[0](*job[1]), jobs))

    if plan.mode == "exact":
        frac = Fraction(nc, nt)
        p = PValue(float(frac), "exact", frac)
    else:
        frac = Fraction(nc + 1, nt + 1)
        p = PValue(float(frac), "bound", frac)
    return RandomizationResult(
        nc=nc,
        nt=nt,
        p=p,
        metric=plan.metric,
        sidedness=plan.sidedness,
        seed=seed,
        mode=plan.mode,
        observed=plan.observed,
        better=plan.better,
        degenerate=plan.degenerate,
    )


@dataclass(frozen=True)
class VerificationReport:
    status: Literal["exact", "checked"]
    first: RandomizationResult | None = None
    second: RandomizationResult | None = None
    runs_agree: bool | None = None
    recall: RandomizationResult | None = None
    sign_p: float | None = None
    sign_standard_error: float | None = None
    sign_agrees: bool | None = None
    message: str = ""

    @property
    def p_difference(self) -> float | None:
        if self.first is None or self.second is None:
            return None
        return abs(self.first.p_value - self.second.p_value)

    def to_dict(self) -> dict:
        out: dict = {"status": self.status, "message": self.message}
        if self.first is not None:
            out.update(
                first=self.first.to_dict(),
                second=self.second.to_dict(),
                p_difference=self.p_difference,
                runs_agree=self.runs_agree,
            )
        if self.recall is not None:
            out.update(
                recall=self.recall.to_dict(),
                sign_p=self.sign_p,
                sign_standard_error=self.sign_standard_error,
                sign_agrees=self.sign_agrees,
            )
        return out


def verify(plan: RandomizationPlan, *, workers: int = 1, n_se: float = 3.0) -> VerificationReport:
    """Repeat an approximate run and cross-check recall against the sign test.

    The rerun uses :func:`derive_seed` of the master seed. The recall check
    reuses the first run's shuffles and compares against the exact sign-test
    p-value, allowing ``n_se`` Monte Carlo standard errors.
    """
    if plan.mode == "exact":
        return VerificationReport("exact", message="verification unnecessary, exact")
    first = randomization_test(plan, workers=workers)
    second = randomization_test(plan, workers=workers, seed=derive_seed(plan.master_seed))
    nt = plan.trials
    se_runs = math.sqrt(
        sum(r.p_value * (1.0 - r.p_value) for r in (first, second)) / nt
    )
    runs_agree = abs(first.p_value - second.p_value) <= n_se * max(se_runs, 1.0 / nt)
    if not plan.counts.has_total:
        return VerificationReport(
            "checked", first, second, runs_agree,
            message="recall cross-check skipped: no total of interest",
        )
    counts = plan.counts
    recall_plan = build_plan(counts, "recall", plan.sidedness, plan.trials, plan.master_seed,
                             mode="approximate")
    recall = randomization_test(recall_plan, workers=workers)
    wins = (counts.c_only1, counts.c_only2)
    if recall_plan.better == 2:
        wins = wins[::-1]
    if sum(wins) == 0:
        return VerificationReport(
            "checked", first, second, runs_agree, recall,
            message="sign test undefined: no discriminating items",
        )
    sign = sign_test(*wins, sidedness=plan.sidedness)
    ps = sign.p_value
    se = math.sqrt(ps * (1.0 - ps) / nt)
    agrees = abs(recall.p_value - ps) <= n_se * max(se, 1.0 / nt)
    return VerificationReport(
        "checked", first, second, runs_agree, recall, ps, se, agrees,
        message="runs agree" if runs_agree and agrees else "check disagreement",
    )

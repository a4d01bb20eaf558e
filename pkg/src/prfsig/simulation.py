"""Correlated paired binary outcomes and rejection-rate studies.

For two binary outcomes the marginals and the correlation fix the joint
distribution::

    P(1,1) = p1 p2 + rho sqrt(p1 (1-p1) p2 (1-p2))
    P(1,0) = p1 - P(1,1)
    P(0,1) = p2 - P(1,1)
    P(0,0) = 1 - p1 - p2 + P(1,1)

:func:`power_study` draws many such test sets and records how often each
test rejects "no difference" at level ``alpha``.
"""

from __future__ import annotations

import csv
import io
import math
from collections.abc import Iterable, Sequence
from dataclasses import asdict, dataclass

import numpy as np

from .analytic import (
    DegenerateStatisticError,
    chi2_2x2,
    matched_pair_t,
    sign_test,
    two_proportion_z,
    two_sample_t,
    wilcoxon_test,
)
from .data import PairedOutcomes, ResponseCounts
from .randomization import build_plan, randomization_test

__all__ = [
    "DEFAULT_TESTS",
    "InadmissibleSpecError",
    "MIN_REPLICATES",
    "PowerRow",
    "SimSpec",
    "cell_probabilities",
    "generate_correlated_pairs",
    "power_study",
    "replicate_seed",
    "rows_to_csv",
]

MIN_REPLICATES = 1000
DEFAULT_TESTS = (
    "sign",
    "wilcoxon",
    "matched_pair_t",
    "two_proportion_z",
    "two_sample_t",
    "chi2_2x2",
)
_KNOWN_TESTS = DEFAULT_TESTS + ("randomization",)
_CELL_TOL = 1e-12


class InadmissibleSpecError(ValueError):
    """The requested marginals and correlation imply a negative cell."""


def cell_probabilities(p1: float, p2: float, rho: float) -> tuple[float, float, float, float]:
    """Joint cell probabilities ``(P11, P10, P01, P00)``."""
    for name, p in (("p1", p1), ("p2", p2)):
        if not 0.0 < p < 1.0:
            raise InadmissibleSpecError(f"{name} must lie in (0, 1), got {p}")
    if not -1.0 <= rho <= 1.0:
        raise InadmissibleSpecError(f"rho must lie in [-1, 1], got {rho}")
    p11 = p1 * p2 + rho * math.sqrt(p1 * (1 - p1) * p2 * (1 - p2))
    cells = [p11, p1 - p11, p2 - p11, 1.0 - p1 - p2 + p11]
    if min(cells) < -_CELL_TOL or max(cells) > 1.0 + _CELL_TOL:
        lo = max(-math.sqrt(p1 * p2 / ((1 - p1) * (1 - p2))),
                 -math.sqrt((1 - p1) * (1 - p2) / (p1 * p2)))
        hi = min(math.sqrt(p1 * (1 - p2) / (p2 * (1 - p1))),
                 math.sqrt(p2 * (1 - p1) / (p1 * (1 - p2))))
        raise InadmissibleSpecError(
            f"rho={rho} is not admissible for p1={p1}, p2={p2}; "
            f"admissible range is [{lo:.6g}, {hi:.6g}]"
        )
    cells = [0.0 if abs(c) < _CELL_TOL else min(c, 1.0) for c in cells]
    total = sum(cells)
    return tuple(c / total for c in cells)


@dataclass(frozen=True)
class SimSpec:
    n_items: int
    p1: float
    p2: float
    rho: float
    replicates: int = 10_000
    alpha: float = 0.05
    seed: int = 0

    def __post_init__(self):
        if self.n_items < 1:
            raise ValueError("n_items must be positive")
        if self.replicates < 0:
            raise ValueError("replicates must be non-negative")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        cell_probabilities(self.p1, self.p2, self.rho)

    @property
    def cells(self) -> tuple[float, float, float, float]:
        return cell_probabilities(self.p1, self.p2, self.rho)


def replicate_seed(seed: int, index: int) -> np.random.SeedSequence:
    """Seed sequence for one replicate; depends only on ``(seed, index)``."""
    return np.random.SeedSequence([seed, index])


def _draw(cells: Sequence[float], n: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    edges = np.cumsum(cells)
    edges[-1] = 1.0
    cat = np.searchsorted(edges, rng.random(n), side="right")
    y1 = (cat == 0) | (cat == 1)
    y2 = (cat == 0) | (cat == 2)
    return y1.astype(np.int8), y2.astype(np.int8)


def generate_correlated_pairs(spec: SimSpec, index: int = 0) -> PairedOutcomes:
    """Draw one test set of ``spec.n_items`` correlated outcome pairs."""
    rng = np.random.default_rng(replicate_seed(spec.seed, index))
    y1, y2 = _draw(spec.cells, spec.n_items, rng)
    return PairedOutcomes(y1, y2)


@dataclass(frozen=True)
class PowerRow:
    method: str
    rho: float
    n: int
    rejection_rate: float
    std_error: float
    rejections: int
    replicates: int
    p1: float
    p2: float
    alpha: float


def _one_sided_p(method: str, pairs: PairedOutcomes, randomization_trials: int, seed: int) -> float:
    """One-sided p-value of ``method`` for "system 1 better"."""
    y1, y2 = pairs.y1, pairs.y2
    n = pairs.n
    both, only1, only2, neither = pairs.joint_counts()
    r1, r2 = both + only1, both + only2
    try:
        if method == "sign":
            return sign_test(only1, only2).p_value
        if method == "wilcoxon":
            return wilcoxon_test(pairs.differences).p_value
        if method == "matched_pair_t":
            return matched_pair_t(pairs).p_value
        if method == "two_proportion_z":
            return two_proportion_z(r1, n, r2, n).p_value
        if method == "two_sample_t":
            return two_sample_t(y1, y2).p_value
        if method == "chi2_2x2":
            return chi2_2x2(r1, n - r1, r2, n - r2, "one").p_value
        if method == "randomization":
            counts = ResponseCounts(both, only1, only2, neither, 0, 0, 0)
            plan = build_plan(counts, "recall", "one", randomization_trials, seed, better=1)
            return randomization_test(plan).p_value
    except DegenerateStatisticError:
        return 1.0
    raise ValueError(f"unknown test {method!r}")


def power_study(
    spec: SimSpec,
    tests: Iterable[str] = DEFAULT_TESTS,
    *,
    randomization_trials: int = 1000,
) -> list[PowerRow]:
    """Rejection rate of each test over ``spec.replicates`` simulated test sets.

    Every test is applied one-sided ("system 1 better") at level
    ``spec.alpha``. The chi-squared test enters through the directional half
    of its two-sided tail. A test whose statistic is degenerate on a
    replicate (for example no discordant items) counts as not rejecting.
    Replicate ``i`` is drawn from :func:`replicate_seed` ``(seed, i)``, so the
    table is reproducible for a fixed seed.
    """
    tests = list(dict.fromkeys(tests))
    unknown = [t for t in tests if t not in _KNOWN_TESTS]
    if unknown:
        raise ValueError(f"unknown test(s): {', '.join(unknown)}")
    if spec.replicates < MIN_REPLICATES:
        raise ValueError(f"replicates must be at least {MIN_REPLICATES}")
    rejections = dict.fromkeys(tests, 0)
    for i in range(spec.replicates):
        pairs = generate_correlated_pairs(spec, i)
        rand_seed = int(replicate_seed(spec.seed, i).generate_state(1, np.uint64)[0])
        for method in tests:
            if _one_sided_p(method, pairs, randomization_trials, rand_seed) <= spec.alpha:
                rejections[method] += 1
    rows = []
    for method in tests:
        k = rejections[method]
        rate = k / spec.replicates
        rows.append(PowerRow(
            method=method,
            rho=spec.rho,
            n=spec.n_items,
            rejection_rate=rate,
            std_error=math.sqrt(rate * (1 - rate) / spec.replicates),
            rejections=k,
            replicates=spec.replicates,
            p1=spec.p1,
            p2=spec.p2,
            alpha=spec.alpha,
        ))
    return rows


CSV_FIELDS = ("method", "rho", "n", "rejection_rate", "std_error")


def rows_to_csv(rows: Iterable[PowerRow], fh=None, *, extended: bool = False) -> str | None:
    """Write rows as CSV (``method,rho,n,rejection_rate,std_error``).

    Returns the text when ``fh`` is None.
    """
    out = io.StringIO() if fh is None else fh
    fields = list(CSV_FIELDS)
    if extended:
        fields += ["rejections", "replicates", "p1", "p2", "alpha"]
    writer = csv.DictWriter(out, fieldnames=fields, extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(asdict(row))
    return out.getvalue() if fh is None else None

"""Closed-form significance tests for a difference between two systems.

Three tests assume the compared results are independent (two-sample t,
two-proportion z, 2x2 chi-squared); three work on matched pairs and use the
per-item differences instead (matched-pair t, sign, Wilcoxon signed-rank).

One-sided p-values are upper tails in the direction "system 1 better than
system 2". For discrete tests the two-sided p-value is twice the smaller
tail, capped at 1.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal

import numpy as np

from .data import PairedOutcomes
from .numerics import (
    WILCOXON_EXACT_MAX_N,
    PValue,
    binomial_tail_exact,
    chi2_sf,
    normal_sf,
    signed_rank_counts,
    t_sf,
)

__all__ = [
    "INDEPENDENCE_METHODS",
    "DegenerateStatisticError",
    "TestResult",
    "chi2_2x2",
    "matched_pair_t",
    "midranks",
    "sign_test",
    "two_proportion_z",
    "two_sample_t",
    "wilcoxon_test",
]

Sidedness = Literal["one", "two"]

INDEPENDENCE_METHODS = frozenset({"two_sample_t", "two_proportion_z", "chi2_2x2"})
METHODS = (
    "two_sample_t",
    "two_proportion_z",
    "chi2_2x2",
    "matched_pair_t",
    "sign",
    "wilcoxon",
    "randomization",
)


class DegenerateStatisticError(ValueError):
    """The test statistic cannot be formed (zero variance, no usable items)."""

    def __init__(self, message: str, observed: float | None = None):
        super().__init__(message)
        self.observed = observed


@dataclass(frozen=True)
class TestResult:
    method: str
    statistic: float | Fraction
    sidedness: Sidedness
    p: PValue
    df_or_n: int
    assumes_independence: bool = field(init=False)
    distribution: str = ""
    convention: str = ""

    __test__ = False  # not a pytest class

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        object.__setattr__(self, "assumes_independence", self.method in INDEPENDENCE_METHODS)

    @property
    def p_value(self) -> float:
        return self.p.value

    def to_dict(self) -> dict:
        stat = self.statistic
        out = {
            "method": self.method,
            "statistic": float(stat),
            "sidedness": self.sidedness,
            "p_value": self.p.value,
            "p_kind": self.p.kind,
            "df_or_n": self.df_or_n,
            "assumes_independence": self.assumes_independence,
            "distribution": self.distribution,
        }
        if isinstance(stat, Fraction):
            out["statistic_exact"] = f"{stat.numerator}/{stat.denominator}"
        if self.p.fraction is not None:
            out["p_exact"] = f"{self.p.fraction.numerator}/{self.p.fraction.denominator}"
        if self.convention:
            out["convention"] = self.convention
        return out


def _check_sidedness(sidedness: str) -> None:
    if sidedness not in ("one", "two"):
        raise ValueError(f"sidedness must be 'one' or 'two', got {sidedness!r}")


def _t_pvalue(stat: float, df: int, sidedness: Sidedness) -> PValue:
    if sidedness == "one":
        return PValue(t_sf(stat, df), "approximation")
    return PValue(min(1.0, 2.0 * t_sf(abs(stat), df)), "approximation")


def _z_pvalue(stat: float, sidedness: Sidedness) -> PValue:
    if sidedness == "one":
        return PValue(normal_sf(stat), "approximation")
    return PValue(min(1.0, 2.0 * normal_sf(abs(stat))), "approximation")


def two_sample_t(
    sample1: Sequence[float], sample2: Sequence[float], sidedness: Sidedness = "one"
) -> TestResult:
    """Pooled-variance two-sample t test (assumes independent samples)."""
    _check_sidedness(sidedness)
    x1 = np.asarray(sample1, dtype=float)
    x2 = np.asarray(sample2, dtype=float)
    n1, n2 = x1.size, x2.size
    if n1 < 2 or n2 < 2:
        raise ValueError("each sample needs at least two values")
    v1 = float(np.var(x1, ddof=1))
    v2 = float(np.var(x2, ddof=1))
    pooled = ((n1 - 1) * v1 + (n2 - 1) * v2) / (n1 + n2 - 2)
    s_d = math.sqrt(pooled * (n1 + n2) / (n1 * n2))
    diff = float(x1.mean() - x2.mean())
    if s_d == 0.0 or (np.all(x1 == x1[0]) and np.all(x2 == x2[0])):
        raise DegenerateStatisticError("zero pooled variance", observed=diff)
    stat = diff / s_d
    df = n1 + n2 - 2
    return TestResult("two_sample_t", stat, sidedness, _t_pvalue(stat, df, sidedness), df,
                      distribution=f"t({df})")


def two_proportion_z(
    r1: int, n1: int, r2: int, n2: int, sidedness: Sidedness = "one"
) -> TestResult:
    """Pooled normal-approximation test of two binomial proportions.

    Treats the two proportions as independent, which is rarely true when
    both come from the same test set.
    """
    _check_sidedness(sidedness)
    if n1 < 1 or n2 < 1:
        raise ValueError("sample sizes must be positive")
    if not (0 <= r1 <= n1 and 0 <= r2 <= n2):
        raise ValueError("counts must lie in [0, n]")
    pooled = Fraction(r1 + r2, n1 + n2)
    if pooled in (0, 1):
        raise DegenerateStatisticError(
            "pooled proportion is 0 or 1", observed=float(Fraction(r1, n1) - Fraction(r2, n2))
        )
    diff = Fraction(r1, n1) - Fraction(r2, n2)
    var = pooled * (1 - pooled) * (Fraction(1, n1) + Fraction(1, n2))
    stat = float(diff) / math.sqrt(var)
    return TestResult("two_proportion_z", stat, sidedness, _z_pvalue(stat, sidedness), n1 + n2,
                      distribution="normal")


def chi2_2x2(r1: int, s1: int, r2: int, s2: int, sidedness: Sidedness = "two") -> TestResult:
    """Chi-squared test on the table ``[[r1, s1], [r2, s2]]`` without Yates.

    The statistic is inherently two-sided: it is large whichever row has the
    higher ``r/s`` ratio. ``sidedness="one"`` reports the directional half of
    the tail toward row 1 having the higher ratio.
    """
    _check_sidedness(sidedness)
    cells = (r1, s1, r2, s2)
    if any(c < 0 for c in cells):
        raise ValueError("cell counts must be non-negative")
    row1, row2 = r1 + s1, r2 + s2
    col1, col2 = r1 + r2, s1 + s2
    if 0 in (row1, row2, col1, col2):
        raise DegenerateStatisticError("a 2x2 marginal is zero")
    total = row1 + row2
    cross = r1 * s2 - s1 * r2
    stat = Fraction(total * cross**2, row1 * row2 * col1 * col2)
    p = chi2_sf(float(stat), 1)
    convention = "no continuity correction"
    if sidedness == "one":
        p = p / 2.0 if cross > 0 else 1.0 - p / 2.0
        convention += "; one-sided = directional half of the chi2(1) tail"
    return TestResult("chi2_2x2", stat, sidedness, PValue(p, "approximation"), 1,
                      distribution="chi2(1)", convention=convention)


def _paired_differences(pairs) -> np.ndarray:
    if isinstance(pairs, PairedOutcomes):
        return pairs.differences.astype(float)
    if isinstance(pairs, tuple) and len(pairs) == 2:
        a = np.asarray(pairs[0], dtype=float)
        b = np.asarray(pairs[1], dtype=float)
        if a.shape != b.shape:
            raise ValueError("paired sequences must have equal length")
        return a - b
    return np.asarray(pairs, dtype=float)


def matched_pair_t(pairs, sidedness: Sidedness = "one") -> TestResult:
    """Matched-pair t test on per-item differences.

    ``pairs`` is a :class:`PairedOutcomes`, a tuple ``(x1, x2)`` of paired
    values, or a sequence of differences.
    """
    _check_sidedness(sidedness)
    d = _paired_differences(pairs)
    n = d.size
    if n < 2:
        raise ValueError("need at least two paired items")
    mean = float(d.mean())
    sd = float(np.std(d, ddof=1))
    if sd == 0.0 or np.all(d == d[0]):
        raise DegenerateStatisticError(
            "all per-item differences are equal; their standard deviation is 0",
            observed=mean,
        )
    stat = mean / (sd / math.sqrt(n))
    return TestResult("matched_pair_t", stat, sidedness, _t_pvalue(stat, n - 1, sidedness), n - 1,
                      distribution=f"t({n - 1})")


def sign_test(n_plus: int, n_minus: int, sidedness: Sidedness = "one") -> TestResult:
    """Exact sign test on the counts of items each system wins.

    Ties must already be excluded.
    """
    _check_sidedness(sidedness)
    if n_plus < 0 or n_minus < 0:
        raise ValueError("counts must be non-negative")
    n = n_plus + n_minus
    if n == 0:
        raise DegenerateStatisticError("no discriminating items (n_plus + n_minus = 0)")
    upper = binomial_tail_exact(n_plus, n)
    if sidedness == "one":
        p = upper
        convention = ""
    else:
        lower = binomial_tail_exact(n_minus, n)
        p = min(Fraction(1), 2 * min(upper, lower))
        convention = "two-sided = 2 * smaller tail, capped at 1"
    return TestResult("sign", n_plus, sidedness, PValue(float(p), "exact", p), n,
                      distribution=f"binomial({n}, 1/2)", convention=convention)


def midranks(values: Sequence[float]) -> np.ndarray:
    """Ranks 1..n with tied values sharing the mean of their positions."""
    x = np.asarray(values, dtype=float)
    _, inverse, sizes = np.unique(x, return_inverse=True, return_counts=True)
    last = np.cumsum(sizes)
    return (last - (sizes - 1) / 2.0)[inverse]


def wilcoxon_test(
    differences: Sequence[float],
    sidedness: Sidedness = "one",
    *,
    method: Literal["auto", "exact", "normal"] = "auto",
    exact_max_n: int = WILCOXON_EXACT_MAX_N,
) -> TestResult:
    """Wilcoxon signed-rank test on paired differences.

    Zeros are dropped and absolute values ranked with midranks. ``"auto"``
    uses the exact null distribution when no ties remain and
    ``n <= exact_max_n``, otherwise the normal approximation with
    tie-corrected variance. ``"exact"`` forces the exact conditional
    distribution over the observed (mid)ranks, ties included.
    """
    _check_sidedness(sidedness)
    if method not in ("auto", "exact", "normal"):
        raise ValueError(f"unknown method {method!r}")
    d = np.asarray(differences, dtype=float)
    d = d[d != 0]
    n = d.size
    if n == 0:
        raise DegenerateStatisticError("all differences are zero", observed=0.0)
    ranks = midranks(np.abs(d))
    w = float(ranks[d > 0].sum())
    _, tie_sizes = np.unique(np.abs(d), return_counts=True)
    has_ties = bool((tie_sizes > 1).any())
    if method == "auto":
        method = "exact" if n <= exact_max_n and not has_ties else "normal"

    if method == "exact":
        doubled = (2 * ranks).astype(np.int64)
        counts = signed_rank_counts(doubled)
        w2 = int(round(2 * w))
        total = 2**n
        upper = Fraction(int(counts[w2:].sum()), total)
        lower = Fraction(int(counts[: w2 + 1].sum()), total)
        if sidedness == "one":
            p = upper
        else:
            p = min(Fraction(1), 2 * min(upper, lower))
        return TestResult("wilcoxon", w, sidedness, PValue(float(p), "exact", p), n,
                          distribution="exact signed-rank",
                          convention="" if sidedness == "one" else "two-sided = 2 * smaller tail, capped at 1")

    mean = n * (n + 1) / 4.0
    var = n * (n + 1) * (2 * n + 1) / 24.0 - float(np.sum(tie_sizes**3 - tie_sizes)) / 48.0
    z = (w - mean) / math.sqrt(var)
    return TestResult("wilcoxon", w, sidedness, _z_pvalue(z, sidedness), n,
                      distribution="normal (tie-corrected)")

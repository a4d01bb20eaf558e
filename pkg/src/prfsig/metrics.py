"""Recall, precision and balanced F-score as exact fractions."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Literal

from .data import ResponseCounts

__all__ = [
    "METRICS",
    "MetricTriple",
    "UndefinedMetricError",
    "f_from_counts",
    "metric_difference",
    "metrics_for",
    "precision_from_counts",
    "render_fraction",
    "render_percent",
]

Metric = Literal["recall", "precision", "f_score"]
METRICS: tuple[str, ...] = ("recall", "precision", "f_score")


class UndefinedMetricError(ValueError):
    """A metric needed for a computation is 0/0 for some system."""


def precision_from_counts(recalled: int, spurious: int) -> Fraction | None:
    found = recalled + spurious
    return Fraction(recalled, found) if found else None


def f_from_counts(recalled: int, spurious: int, total: int) -> Fraction | None:
    """Balanced F-score ``2ab/(a+b)`` written over integers.

    With ``a = R/T`` and ``b = R/(R+S)`` this reduces to ``2R/(R+S+T)``
    whenever both are defined and ``R > 0``.
    """
    if recalled == 0 or total == 0:
        return None
    return Fraction(2 * recalled, recalled + spurious + total)


@dataclass(frozen=True)
class MetricTriple:
    recall: Fraction | None
    precision: Fraction | None
    f_score: Fraction | None

    def get(self, which: str) -> Fraction | None:
        if which not in METRICS:
            raise ValueError(f"unknown metric {which!r}; expected one of {METRICS}")
        return getattr(self, which)

    def as_percentages(self, places: int = 1) -> dict[str, str]:
        return {m: render_percent(self.get(m), places) for m in METRICS}


def metrics_for(counts: ResponseCounts, system: int) -> MetricTriple:
    """Compute the metric triple of one system from a count summary.

    Recall (and therefore F) is ``None`` when the counts carry no total of
    interest; precision is ``None`` when the system produced no responses.
    """
    r = counts.recalled(system)
    s = counts.spurious(system)
    precision = precision_from_counts(r, s)
    if not counts.has_total:
        return MetricTriple(None, precision, None)
    total = counts.total_of_interest
    recall = Fraction(r, total)
    if precision is None or recall + precision == 0:
        f = None
    else:
        f = 2 * recall * precision / (recall + precision)
    return MetricTriple(recall, precision, f)


def metric_difference(a: MetricTriple, b: MetricTriple, which: Metric) -> Fraction:
    """Signed exact difference ``a - b`` of the selected metric."""
    left, right = a.get(which), b.get(which)
    if left is None or right is None:
        raise UndefinedMetricError(f"{which} is undefined for at least one system")
    return left - right


def render_percent(value: Fraction | None, places: int = 1) -> str:
    """Render a fraction as a percentage, rounding half away from zero."""
    if value is None:
        return "undef"
    scaled = abs(value) * 100 * 10**places
    digits = (2 * scaled.numerator + scaled.denominator) // (2 * scaled.denominator)
    text = f"{digits:0{places + 1}d}"
    if places:
        text = f"{text[:-places]}.{text[-places:]}"
    sign = "-" if value < 0 and digits else ""
    return f"{sign}{text}%"


def render_fraction(value: Fraction | None) -> str:
    if value is None:
        return "undef"
    return f"{value.numerator}/{value.denominator}"

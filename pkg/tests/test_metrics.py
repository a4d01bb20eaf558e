from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from prfsig.data import ResponseCounts
from prfsig.metrics import (
    MetricTriple,
    UndefinedMetricError,
    f_from_counts,
    metric_difference,
    metrics_for,
    precision_from_counts,
    render_fraction,
    render_percent,
)


def test_worked_table_fractions(worked_counts):
    one = metrics_for(worked_counts, 1)
    two = metrics_for(worked_counts, 2)
    assert one == MetricTriple(Fraction(47, 103), Fraction(47, 95), Fraction(94, 198))
    assert two.recall == Fraction(25, 103)
    assert two.precision == Fraction(25, 39)
    assert two.f_score == Fraction(50, 142)


@pytest.mark.parametrize(
    "value, expected",
    [
        (Fraction(1, 2000), "0.1%"),  # exact half rounds away from zero
        (Fraction(-1, 2000), "-0.1%"),
        (Fraction(1, 3000), "0.0%"),
        (Fraction(1), "100.0%"),
        (Fraction(0), "0.0%"),
        (None, "undef"),
    ],
)
def test_render_percent(value, expected):
    assert render_percent(value) == expected


def test_render_percent_places():
    assert render_percent(Fraction(47, 103), places=3) == "45.631%"
    assert render_percent(Fraction(47, 103), places=0) == "46%"


def test_render_fraction():
    assert render_fraction(Fraction(47, 103)) == "47/103"
    assert render_fraction(None) == "undef"


def test_silent_system():
    counts = ResponseCounts(0, 3, 0, 2, 0, 1, 0)
    m = metrics_for(counts, 2)
    assert m.recall == 0
    assert m.precision is None
    assert m.f_score is None
    assert m.as_percentages()["precision"] == "undef"


def test_perfect_system():
    counts = ResponseCounts(5, 0, 0, 0, 0, 0, 0)
    assert set(metrics_for(counts, 1).as_percentages().values()) == {"100.0%"}


def test_difference_undefined():
    counts = ResponseCounts(0, 3, 0, 2, 0, 1, 0)
    with pytest.raises(UndefinedMetricError):
        metric_difference(metrics_for(counts, 1), metrics_for(counts, 2), "precision")
    with pytest.raises(ValueError):
        metrics_for(counts, 1).get("accuracy")


@given(st.integers(0, 200), st.integers(0, 200), st.integers(1, 200))
def test_f_matches_harmonic_mean(r, s, extra):
    total = r + extra
    f = f_from_counts(r, s, total)
    if r == 0:
        assert f is None
        return
    a = Fraction(r, total)
    b = precision_from_counts(r, s)
    assert f == 2 * a * b / (a + b)
    assert min(a, b) <= f <= max(a, b)

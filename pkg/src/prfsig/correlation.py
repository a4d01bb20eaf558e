"""Correlation between two systems' per-item outcomes and its effect on the
standard deviation of their difference."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .data import PairedOutcomes

__all__ = [
    "CorrelationReport",
    "UndefinedCorrelationError",
    "combine_sd",
    "estimate_r12",
    "independence_inflation",
    "phi_coefficient",
]


class UndefinedCorrelationError(ValueError):
    """Raised when a sequence is constant, so the correlation is 0/0."""


@dataclass(frozen=True)
class CorrelationReport:
    r12: float
    s1: float
    s2: float
    n: int

    @property
    def s_d(self) -> float:
        """Standard deviation of per-item differences implied by r12."""
        return combine_sd(self.s1, self.s2, self.r12)

    @property
    def s_d_independent(self) -> float:
        return combine_sd(self.s1, self.s2, 0.0)


def estimate_r12(pairs: PairedOutcomes | tuple) -> CorrelationReport:
    """Sample correlation of two outcome sequences.

    ``r12 = sum_k (y1k - mean1)(y2k - mean2) / (s1 s2 (n - 1))`` with ``s_i``
    the ``n - 1`` sample standard deviations. Accepts :class:`PairedOutcomes`
    or any pair of equal-length numeric sequences.
    """
    if isinstance(pairs, PairedOutcomes):
        y1, y2 = pairs.y1, pairs.y2
    else:
        y1, y2 = pairs
    y1 = np.asarray(y1, dtype=float)
    y2 = np.asarray(y2, dtype=float)
    if y1.shape != y2.shape or y1.ndim != 1:
        raise ValueError("sequences must be 1-d and of equal length")
    n = y1.size
    if n < 2:
        raise ValueError("need at least two items")
    c1 = y1 - y1.mean()
    c2 = y2 - y2.mean()
    s1 = math.sqrt(float(c1 @ c1) / (n - 1))
    s2 = math.sqrt(float(c2 @ c2) / (n - 1))
    if s1 == 0.0 or s2 == 0.0:
        raise UndefinedCorrelationError(
            "r12 is undefined: at least one system's outcomes are constant"
        )
    r = float(c1 @ c2) / (s1 * s2 * (n - 1))
    return CorrelationReport(r12=min(1.0, max(-1.0, r)), s1=s1, s2=s2, n=n)


def phi_coefficient(both: int, only1: int, only2: int, neither: int) -> float:
    """Phi coefficient of a 2x2 joint-count table."""
    row1, row0 = both + only1, only2 + neither
    col1, col0 = both + only2, only1 + neither
    denom = row1 * row0 * col1 * col0
    if denom == 0:
        raise UndefinedCorrelationError("phi is undefined for a table with an empty margin")
    return (both * neither - only1 * only2) / math.sqrt(denom)


def combine_sd(s1: float, s2: float, r12: float) -> float:
    """``sqrt(s1^2 + s2^2 - 2 r12 s1 s2)``."""
    if s1 < 0 or s2 < 0:
        raise ValueError("standard deviations must be non-negative")
    if not -1.0 <= r12 <= 1.0:
        raise ValueError(f"r12 must lie in [-1, 1], got {r12}")
    radicand = s1 * s1 + s2 * s2 - 2.0 * r12 * s1 * s2
    return math.sqrt(max(radicand, 0.0))


def independence_inflation(r12: float) -> float:
    """Factor by which assuming independence overstates sd(d) for equal sds.

    ``s_d_ind / s_d = 1 / sqrt(1 - r12)``; ``inf`` at ``r12 = 1``.
    """
    if not -1.0 <= r12 <= 1.0:
        raise ValueError(f"r12 must lie in [-1, 1], got {r12}")
    if r12 == 1.0:
        return math.inf
    return 1.0 / math.sqrt(1.0 - r12)

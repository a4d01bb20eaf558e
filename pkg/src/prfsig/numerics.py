"""Survival functions for the normal, Student t, chi-squared, binomial and
Wilcoxon signed-rank distributions.

The t and chi-squared tails go through regularized incomplete beta and gamma
functions evaluated by continued fractions (modified Lentz) with a power
series for the gamma function's lower region. No continuity corrections are
applied anywhere.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal

import numpy as np

__all__ = [
    "PValue",
    "WILCOXON_EXACT_MAX_N",
    "betainc_regularized",
    "binomial_tail",
    "binomial_tail_exact",
    "chi2_sf",
    "gammainc_upper_regularized",
    "normal_sf",
    "signed_rank_counts",
    "t_sf",
    "wilcoxon_signed_rank_sf",
]

_EPS = 1e-16
_TINY = 1e-300
_MAX_ITER = 100_000

WILCOXON_EXACT_MAX_N = 50


@dataclass(frozen=True)
class PValue:
    """Tail probability under the null, tagged with how it was obtained.

    ``kind`` is ``"exact"`` for an exact tail probability, ``"bound"`` for a
    sampled upper bound and ``"approximation"`` for a continuous
    approximation. ``fraction`` carries the exact rational when known.
    """

    value: float
    kind: Literal["exact", "bound", "approximation"]
    fraction: Fraction | None = None

    def __post_init__(self):
        if not 0.0 <= self.value <= 1.0 or math.isnan(self.value):
            raise ValueError(f"p-value {self.value} outside [0, 1]")
        if self.kind not in ("exact", "bound", "approximation"):
            raise ValueError(f"unknown p-value kind {self.kind!r}")

    def __float__(self) -> float:
        return self.value


def _clip01(x: float) -> float:
    return min(1.0, max(0.0, x))


def normal_sf(z: float) -> float:
    """Upper tail ``P(Z >= z)`` of the standard normal."""
    if math.isnan(z):
        raise ValueError("z must not be NaN")
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta function (Lentz)."""
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_ITER):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


def _stirling_tail(z: float) -> float:
    """``lgamma(z) - [(z - 1/2) log z - z + log(2 pi)/2]`` for ``z >= 10``."""
    z2 = z * z
    return (1.0 / 12.0 - (1.0 / 360.0 - (1.0 / 1260.0 - 1.0 / (1680.0 * z2)) / z2) / z2) / z


def _lgamma_shift(a: float, b: float) -> float:
    """``lgamma(a + b) - lgamma(a)`` without cancellation for large ``a``."""
    if a < 10.0:
        return math.lgamma(a + b) - math.lgamma(a)
    return (
        (a + b - 0.5) * math.log1p(b / a) + b * math.log(a) - b
        + _stirling_tail(a + b) - _stirling_tail(a)
    )


def _log_beta_prefactor(a: float, b: float, log_x: float, log_y: float) -> float:
    """``log(x^a y^b / B(a, b))`` with ``y = 1 - x`` supplied separately."""
    big, small = (a, b) if a >= b else (b, a)
    return _lgamma_shift(big, small) - math.lgamma(small) + a * log_x + b * log_y


def _betainc_pair(a: float, b: float, x: float, y: float, log_x: float, log_y: float) -> tuple[float, float]:
    """Return ``(I_x(a, b), 1 - I_x(a, b))`` given ``x`` and ``y = 1 - x``."""
    front = math.exp(_log_beta_prefactor(a, b, log_x, log_y))
    if x < (a + 1.0) / (a + b + 2.0):
        lower = _clip01(front * _betacf(a, b, x) / a)
        return lower, 1.0 - lower
    upper = _clip01(front * _betacf(b, a, y) / b)
    return 1.0 - upper, upper


def betainc_regularized(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta ``I_x(a, b)`` for ``a, b > 0``."""
    if a <= 0 or b <= 0:
        raise ValueError("a and b must be positive")
    if not 0.0 <= x <= 1.0:
        raise ValueError("x must lie in [0, 1]")
    if x == 0.0 or x == 1.0:
        return x
    return _betainc_pair(a, b, x, 1.0 - x, math.log(x), math.log1p(-x))[0]


def t_sf(t: float, df: int) -> float:
    """Upper tail ``P(T >= t)`` of Student's t with ``df`` degrees of freedom."""
    if isinstance(df, bool) or int(df) != df or df < 1:
        raise ValueError(f"df must be a positive integer, got {df!r}")
    if math.isnan(t):
        raise ValueError("t must not be NaN")
    if math.isinf(t):
        return 0.0 if t > 0 else 1.0
    if t == 0.0:
        return 0.5
    # P(|T| >= |t|) = I_x(df/2, 1/2) with x = df/(df+t^2); x and 1-x are
    # formed separately so neither side loses digits
    t2 = t * t
    if t2 == 0.0:
        # |t| is subnormal; the tail differs from 1/2 by far less than an ulp
        return 0.5
    x = df / (df + t2)
    y = t2 / (df + t2)
    log_x = -math.log1p(t2 / df)
    log_y = math.log(t2) - math.log(df + t2) if t2 < df else -math.log1p(df / t2)
    two_tail = _betainc_pair(df / 2.0, 0.5, x, y, log_x, log_y)[0]
    tail = 0.5 * two_tail
    return tail if t > 0 else 1.0 - tail


def _gamma_series(a: float, x: float) -> float:
    """Lower regularized gamma ``P(a, x)`` by power series (x < a + 1)."""
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            return total * math.exp(-x + a * math.log(x) - math.lgamma(a))
    raise ArithmeticError(f"incomplete gamma series did not converge (a={a}, x={x})")


def _gamma_cf(a: float, x: float) -> float:
    """Upper regularized gamma ``Q(a, x)`` by continued fraction (x >= a + 1)."""
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h
    raise ArithmeticError(f"incomplete gamma continued fraction did not converge (a={a}, x={x})")


def gammainc_upper_regularized(a: float, x: float) -> float:
    """Regularized upper incomplete gamma ``Q(a, x)``."""
    if a <= 0:
        raise ValueError("a must be positive")
    if x < 0:
        raise ValueError("x must be non-negative")
    if x == 0:
        return 1.0
    if math.isinf(x):
        return 0.0
    if x < a + 1.0:
        return _clip01(1.0 - _gamma_series(a, x))
    return _clip01(_gamma_cf(a, x))


def chi2_sf(x: float, df: int) -> float:
    """Upper tail ``P(X >= x)`` of the chi-squared distribution."""
    if isinstance(df, bool) or int(df) != df or df < 1:
        raise ValueError(f"df must be a positive integer, got {df!r}")
    if math.isnan(x) or x < 0:
        raise ValueError(f"x must be non-negative, got {x}")
    return gammainc_upper_regularized(df / 2.0, x / 2.0)


def _check_binomial(k: int, n: int) -> None:
    if isinstance(n, bool) or int(n) != n or n < 0:
        raise ValueError(f"n must be a non-negative integer, got {n!r}")
    if isinstance(k, bool) or int(k) != k or not 0 <= k <= n:
        raise ValueError(f"k must be an integer in [0, n], got {k!r}")


def binomial_tail(k: int, n: int, p: float) -> float:
    """``P(X >= k)`` for ``X ~ Binomial(n, p)``, summed in log space."""
    _check_binomial(k, n)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if k == 0:
        return 1.0
    if p == 0.0:
        return 0.0
    if p == 1.0:
        return 1.0
    # sum the shorter side to avoid 1 - (almost 1)
    mode = (n + 1) * p
    upper = k > mode
    terms = range(k, n + 1) if upper else range(0, k)
    lp, lq = math.log(p), math.log1p(-p)
    lgn = math.lgamma(n + 1)
    logs = [lgn - math.lgamma(i + 1) - math.lgamma(n - i + 1) + i * lp + (n - i) * lq for i in terms]
    top = max(logs)
    mass = math.exp(top) * math.fsum(math.exp(v - top) for v in logs)
    return _clip01(mass if upper else 1.0 - mass)


def binomial_tail_exact(k: int, n: int, p: Fraction | int = Fraction(1, 2)) -> Fraction:
    """Exact ``P(X >= k)`` for a rational success probability."""
    _check_binomial(k, n)
    p = Fraction(p)
    if not 0 <= p <= 1:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    q = 1 - p
    return sum((math.comb(n, i) * p**i * q ** (n - i) for i in range(k, n + 1)), Fraction(0))


def signed_rank_counts(weights: Sequence[int]) -> np.ndarray:
    """Number of sign assignments reaching each positive-rank sum.

    ``weights`` are non-negative integer ranks (pass doubled midranks when
    ties are present). Entry ``s`` of the result counts the subsets of
    ``weights`` summing to ``s``; the entries sum to ``2**len(weights)``.
    """
    weights = [int(w) for w in weights]
    if any(w < 0 for w in weights):
        raise ValueError("weights must be non-negative")
    dtype = np.int64 if len(weights) <= 62 else object
    counts = np.zeros(sum(weights) + 1, dtype=dtype)
    counts[0] = 1
    for w in weights:
        if w:
            counts[w:] = counts[w:] + counts[:-w].copy()
        else:
            counts = counts * 2
    return counts


def wilcoxon_signed_rank_sf(
    w: float,
    n: int,
    *,
    exact_max_n: int = WILCOXON_EXACT_MAX_N,
) -> float:
    """``P(W >= w)`` for the signed-rank sum of ``n`` untied ranks.

    Exact for ``n <= exact_max_n``; otherwise the normal approximation with
    mean ``n(n+1)/4`` and variance ``n(n+1)(2n+1)/24``.
    """
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    if n <= exact_max_n:
        counts = signed_rank_counts(range(1, n + 1))
        start = max(0, math.ceil(w - 1e-9))
        if start >= counts.size:
            return 0.0
        return float(Fraction(int(counts[start:].sum()), 2**n))
    mean = n * (n + 1) / 4.0
    var = n * (n + 1) * (2 * n + 1) / 24.0
    return normal_sf((w - mean) / math.sqrt(var))

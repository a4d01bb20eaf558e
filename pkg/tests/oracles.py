"""Slow reference implementations used as test oracles.

Each one is written independently of the package: arbitrary-precision
special functions from mpmath, exact rational sums with math.comb, or
brute-force enumeration.
"""

import itertools
import math
from fractions import Fraction

import mpmath
import numpy as np

mpmath.mp.dps = 50

# 50-point grids for the distribution functions
NORMAL_GRID = list(np.linspace(-8.0, 8.0, 50))
T_GRID = list(zip(
    [1, 2, 3, 5, 10, 30, 100, 1000, 10**5, 10**6] * 5,
    [v for v in (-4.0, 0.3, 1.0, 2.5, 9.0) for _ in range(10)],
))
CHI2_GRID = list(zip(
    [1, 2, 3, 7, 20] * 10,
    [v for v in np.linspace(0.05, 60.0, 10) for _ in range(5)],
))
_rng = np.random.default_rng(20240601)
BINOMIAL_GRID = []
while len(BINOMIAL_GRID) < 50:
    n = int(_rng.integers(1, 400))
    k = int(_rng.integers(0, n + 1))
    p = float(_rng.choice([0.5, 0.1, 0.3, 0.77, 0.95, float(_rng.uniform(0.01, 0.99))]))
    BINOMIAL_GRID.append((k, n, p))


def normal_sf(z):
    return float(mpmath.erfc(mpmath.mpf(z) / mpmath.sqrt(2)) / 2)


def t_sf(t, df):
    t = mpmath.mpf(t)
    x = df / (df + t * t)
    tail = mpmath.betainc(mpmath.mpf(df) / 2, mpmath.mpf(1) / 2, 0, x, regularized=True) / 2
    return float(tail if t >= 0 else 1 - tail)


def chi2_sf(x, df):
    return float(mpmath.gammainc(mpmath.mpf(df) / 2, mpmath.mpf(x) / 2, mpmath.inf, regularized=True))


def binomial_tail(k, n, p):
    p = Fraction(p)
    q = 1 - p
    return sum((math.comb(n, i) * p**i * q ** (n - i) for i in range(k, n + 1)), Fraction(0))


def signed_rank_distribution(weights):
    """Map rank sum -> number of sign patterns, by full enumeration."""
    out = {}
    for signs in itertools.product((0, 1), repeat=len(weights)):
        s = sum(w for w, b in zip(weights, signs) if b)
        out[s] = out.get(s, 0) + 1
    return out


def signed_rank_polynomial(n):
    """Coefficients of prod_{i=1..n} (1 + x^i) in Python integers."""
    coeffs = [1]
    for i in range(1, n + 1):
        shifted = [0] * i + coeffs
        coeffs = [a + b for a, b in itertools.zip_longest(coeffs, shifted, fillvalue=0)]
    return coeffs


def randomization_exact(counts, metric, sidedness, better, run_trial, plan):
    """Exact p by listing every assignment of the plan's units."""
    hits = 0
    total = 0
    observed = plan.observed
    for bits in itertools.product((False, True), repeat=plan.n_units):
        diff = run_trial(plan, bits)
        total += 1
        if diff is None:
            hits += 1
        elif sidedness == "two":
            hits += abs(diff) >= abs(observed)
        elif better == 1:
            hits += diff >= observed
        else:
            hits += -diff >= -observed
    return Fraction(hits, total)


def _metric(metric, r, s, total):
    if metric == "recall":
        return Fraction(r, total)
    if metric == "precision":
        return Fraction(r, r + s) if r + s else None
    if r == 0:
        return None
    rec = Fraction(r, total)
    prec = Fraction(r, r + s)
    return 2 * rec * prec / (rec + prec)


def randomization_convolution(counts, metric, sidedness, better):
    """Exact shuffle p-value summed over how many exclusive correct and
    spurious responses land with system 1 (each a fair binomial)."""
    nc = counts.c_only1 + counts.c_only2
    ns = counts.s_only1 + counts.s_only2
    total = counts.total_of_interest

    def diff(kc, ks):
        m1 = _metric(metric, counts.c_both + kc, counts.s_both + ks, total)
        m2 = _metric(metric, counts.c_both + nc - kc, counts.s_both + ns - ks, total)
        return None if m1 is None or m2 is None else m1 - m2

    observed = diff(counts.c_only1, counts.s_only1)
    weight = 0
    for kc in range(nc + 1):
        for ks in range(ns + 1):
            d = diff(kc, ks)
            if d is None:
                hit = True
            elif sidedness == "two":
                hit = abs(d) >= abs(observed)
            else:
                hit = (d >= observed) if better == 1 else (d <= observed)
            if hit:
                weight += math.comb(nc, kc) * math.comb(ns, ks)
    return Fraction(weight, 2 ** (nc + ns))

# (w, n) pairs for the signed-rank tail, small enough to enumerate
WILCOXON_GRID = [(w, n) for n in (1, 3, 5, 8, 10, 12, 14) for w in np.linspace(0, n * (n + 1) / 2, 7)][:49] + [(60, 14)]


def signed_rank_sf(w, n):
    dist = signed_rank_distribution(range(1, n + 1))
    return Fraction(sum(c for s, c in dist.items() if s >= w - 1e-9), 2**n)

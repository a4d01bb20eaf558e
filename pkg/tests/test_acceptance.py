"""Acceptance criteria, one test per criterion.

Each test prints a single ``PASS``/``FAIL`` line with the measured values
and then asserts the criterion at its stated tolerance. Run on its own with

    pytest tests/test_acceptance.py -v -s

or ``python tests/test_acceptance.py``.
"""

import math
import time
import timeit
from fractions import Fraction

import numpy as np
import pytest

import oracles
from prfsig.analytic import (
    chi2_2x2,
    matched_pair_t,
    sign_test,
    two_proportion_z,
    two_sample_t,
    wilcoxon_test,
)
from prfsig.correlation import independence_inflation
from prfsig.data import ResponseCounts
from prfsig.metrics import METRICS, metrics_for
from prfsig.numerics import (
    binomial_tail,
    chi2_sf,
    normal_sf,
    signed_rank_counts,
    t_sf,
    wilcoxon_signed_rank_sf,
)
from prfsig.randomization import build_plan, randomization_test
from prfsig.simulation import DEFAULT_TESTS, SimSpec, power_study

WORKED = ResponseCounts(19, 28, 6, 50, 5, 43, 9, 103)
TRIALS = 2**20


@pytest.fixture
def report(capsys):
    def emit(number, ok, text):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'}  criterion {number}: {text}")
        return ok
    return emit


def test_c1_metrics_table(report):
    expected = {1: ("45.6%", "49.5%", "47.5%"), 2: ("24.3%", "64.1%", "35.2%")}

    def render():
        return {s: tuple(metrics_for(WORKED, s).as_percentages()[m] for m in METRICS) for s in (1, 2)}

    got = render()
    seconds = min(timeit.repeat(render, number=100, repeat=5)) / 100
    ok = got == expected and seconds < 1e-3
    report(1, ok, f"I {'/'.join(got[1])}, II {'/'.join(got[2])}; {seconds * 1e6:.0f} us per table")
    assert got == expected
    assert seconds < 1e-3


def test_c2_chi_squared(report):
    result = chi2_2x2(47, 48, 25, 14)
    stat = float(result.statistic)
    ok = abs(stat - 2.38) <= 0.01 and 0.10 < result.p_value < 0.20
    report(2, ok, f"chi2 = {stat:.4f}, p = {result.p_value:.4f}")
    assert abs(stat - 2.38) <= 0.01
    assert 0.10 < result.p_value < 0.20


def test_c3_inflation_table(report):
    expected = {0.38: 1.27, 0.50: 1.41, 0.80: 2.24}
    got = {r: independence_inflation(r) for r in expected}
    ok = all(abs(got[r] - v) <= 0.005 for r, v in expected.items())
    report(3, ok, ", ".join(f"r12={r:.2f} -> {v:.4f}" for r, v in got.items()))
    for r, v in expected.items():
        assert abs(got[r] - v) <= 0.005


def test_c4_randomization_reproduction(report):
    runs = {
        "recall": (build_plan(WORKED, "recall", "one", TRIALS, 0), (5e-5, 1.5e-4)),
        "f_score": (build_plan(WORKED, "f_score", "one", TRIALS, 0), (0.0131, 0.0151)),
        "precision": (build_plan(WORKED, "precision", "one", TRIALS, 0, better=2), (0.0236, 0.0256)),
        "precision two-sided": (build_plan(WORKED, "precision", "two", TRIALS, 0), (0.0, 0.04)),
    }
    outcomes = {}
    for name, (plan, (lo, hi)) in runs.items():
        start = time.perf_counter()
        result = randomization_test(plan)
        seconds = time.perf_counter() - start
        inside = lo <= result.p_value <= hi if name != "precision two-sided" else result.p_value < hi
        outcomes[name] = (result, inside and seconds < 10.0, seconds, (lo, hi))
    ok = all(o[1] for o in outcomes.values())
    text = "; ".join(
        f"{name} nc={r.nc} p={r.p_value:.4g} "
        + (f"< {hi:g}" if lo == 0.0 else f"in [{lo:g}, {hi:g}]")
        + f"{'' if good else ' NO'} ({s:.2f}s)"
        for name, (r, good, s, (lo, hi)) in outcomes.items()
    )
    report(4, ok, text)
    failed = [name for name, o in outcomes.items() if not o[1]]
    assert not failed, f"outside window or over 10 s: {failed}"


def test_c5_sign_matches_randomization(report):
    # independent integer summation of C(34, k), k = 28..34
    weight = sum(math.comb(34, k) for k in range(28, 35))
    sign = sign_test(28, 6)
    result = randomization_test(build_plan(WORKED, "recall", "one", TRIALS, 0))
    p = float(sign.p.fraction)
    se = math.sqrt(p * (1 - p) / TRIALS)
    gap = abs(result.p_value - p)
    ok = weight == 1676116 and sign.p.fraction == Fraction(weight, 2**34) and gap <= 3 * se
    report(5, ok, f"sign p = {weight}/2^34 = {p:.6g}; randomization p = {result.p_value:.6g}, "
                  f"|gap| = {gap / se:.2f} SE")
    assert weight == 1676116
    assert sign.p.fraction == Fraction(1676116, 2**34)
    assert gap <= 3 * se


def _random_counts(rng):
    """Counts with 1..14 exclusive responses and every metric defined."""
    while True:
        units = rng.multinomial(int(rng.integers(1, 15)), [0.25] * 4)
        counts = ResponseCounts(
            c_both=int(rng.integers(0, 6)), c_only1=int(units[0]), c_only2=int(units[1]),
            miss_both=int(rng.integers(1, 6)), s_both=int(rng.integers(0, 6)),
            s_only1=int(units[2]), s_only2=int(units[3]),
        )
        if all(metrics_for(counts, s).get(m) is not None for s in (1, 2) for m in METRICS):
            return counts


def test_c6_exact_enumeration_oracle(report):
    rng = np.random.default_rng(0)
    cases = [_random_counts(rng) for _ in range(200)]
    disagreements = []
    recall_mismatches = []
    worst = 0.0
    for index, counts in enumerate(cases):
        for metric in METRICS:
            exact = randomization_test(build_plan(counts, metric, "one", mode="exact"))
            approx = randomization_test(
                build_plan(counts, metric, "one", TRIALS, seed=index, mode="approximate"), workers=4
            )
            p = float(exact.p.fraction)
            se = math.sqrt(p * (1 - p) / TRIALS)
            gap = abs(approx.nc / approx.nt - p)
            z = gap / se if se else (0.0 if gap == 0 else math.inf)
            worst = max(worst, z)
            if z > 3:
                disagreements.append((index, metric, round(z, 2)))
            if metric == "recall":
                plan = build_plan(counts, "recall", "one", mode="exact")
                wins = (counts.c_only1, counts.c_only2)[:: 1 if plan.better == 1 else -1]
                n = sum(wins)
                closed = oracles.binomial_tail(wins[0], n, Fraction(1, 2)) if n else Fraction(1)
                if exact.p.fraction != closed:
                    recall_mismatches.append(index)
    ok = not disagreements and not recall_mismatches
    report(6, ok, f"600 comparisons, largest gap {worst:.2f} SE; beyond 3 SE: {disagreements or 'none'}; "
                  f"recall closed-form mismatches: {recall_mismatches or 'none'}")
    assert not recall_mismatches
    assert not disagreements


def test_c7_determinism(report):
    nc = {}
    for metric in METRICS:
        plan = build_plan(WORKED, metric, "one", TRIALS, 20240601)
        nc[metric] = {randomization_test(plan, workers=w).nc for w in (1, 1, 2, 8)}
    ok = all(len(v) == 1 for v in nc.values())
    report(7, ok, ", ".join(f"{m} nc={sorted(v)}" for m, v in nc.items()) + " over runs 1,1,2,8 workers")
    assert ok


def test_c8_numerics(report):
    errors = {
        "normal_sf": (max(abs(normal_sf(z) - oracles.normal_sf(z)) for z in oracles.NORMAL_GRID), 1e-12),
        "t_sf": (max(abs(t_sf(t, df) - oracles.t_sf(t, df)) for df, t in oracles.T_GRID), 1e-10),
        "chi2_sf": (max(abs(chi2_sf(x, df) - oracles.chi2_sf(x, df)) for df, x in oracles.CHI2_GRID), 1e-10),
    }
    rel = 0.0
    for k, n, p in oracles.BINOMIAL_GRID:
        exact = oracles.binomial_tail(k, n, p)
        rel = max(rel, float(abs(Fraction(binomial_tail(k, n, p)) - exact) / exact) if exact else 0.0)
    errors["binomial_tail (relative)"] = (rel, 1e-9)
    wil = max(abs(wilcoxon_signed_rank_sf(w, n) - float(oracles.signed_rank_sf(w, n)))
              for w, n in oracles.WILCOXON_GRID)
    errors["wilcoxon_signed_rank_sf"] = (wil, 0.0)
    mass_ok = all(int(signed_rank_counts(range(1, n + 1)).sum()) == 2**n for n in range(1, 21))
    grid_sizes = {len(g) for g in (oracles.NORMAL_GRID, oracles.T_GRID, oracles.CHI2_GRID,
                                    oracles.BINOMIAL_GRID, oracles.WILCOXON_GRID)}
    ok = all(e <= tol for e, tol in errors.values()) and mass_ok and grid_sizes == {50}
    report(8, ok, ", ".join(f"{k} max err {e:.1e} (tol {tol:g})" for k, (e, tol) in errors.items())
           + f"; Wilcoxon mass exactly 2^n for n<=20: {mass_ok}")
    assert grid_sizes == {50}
    for name, (err, tol) in errors.items():
        assert err <= tol, name
    assert mass_ok


def test_c9_thesis_demonstration(report):
    start = time.perf_counter()
    rows = {}
    for rho in (0.5, 0.0):
        spec = SimSpec(200, 0.6, 0.5, rho, replicates=10_000, seed=0)
        rows[rho] = {r.method: r for r in power_study(spec, ["sign", "two_proportion_z"])}
    seconds = time.perf_counter() - start
    sign5, z5 = rows[0.5]["sign"], rows[0.5]["two_proportion_z"]
    sign0, z0 = rows[0.0]["sign"], rows[0.0]["two_proportion_z"]
    gap5 = sign5.rejection_rate - z5.rejection_rate
    gap0 = abs(sign0.rejection_rate - z0.rejection_rate)
    se0 = math.hypot(sign0.std_error, z0.std_error)
    ok = gap5 >= 0.05 and gap0 <= 3 * se0 and seconds < 60
    report(9, ok, f"rho=0.5: sign {sign5.rejection_rate:.4f} vs z {z5.rejection_rate:.4f} "
                  f"(gap {gap5 * 100:.1f} pp, need >= 5); rho=0: sign {sign0.rejection_rate:.4f} vs "
                  f"z {z0.rejection_rate:.4f} (gap {gap0 / se0:.1f} SE, need <= 3); {seconds:.1f}s")
    assert gap5 >= 0.05
    assert seconds < 60
    assert gap0 <= 3 * se0


def test_c10_level_validity(report):
    tests = list(DEFAULT_TESTS) + ["randomization"]
    rates = {}
    for rho in (0.0, 0.5):
        spec = SimSpec(200, 0.5, 0.5, rho, replicates=10_000, seed=1)
        for row in power_study(spec, tests, randomization_trials=1000):
            rates[(row.method, rho)] = row.rejection_rate
    worst = max(rates, key=rates.get)
    ok = all(r <= 0.06 for r in rates.values())
    report(10, ok, f"{len(rates)} rates, max {rates[worst]:.4f} ({worst[0]}, rho={worst[1]}), limit 0.06")
    assert ok, {k: v for k, v in rates.items() if v > 0.06}


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))

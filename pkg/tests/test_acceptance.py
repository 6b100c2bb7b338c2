"""Exit criteria, each at its pinned tolerance and runtime budget.

Run with ``pytest tests/test_acceptance.py -v``; one PASS/FAIL line per
criterion is printed in the terminal summary.
"""
import math
import time

import numpy as np

from romlab.lacunary import LacunaryParams, generate
from romlab.primes import count_primes_in_ap, logarithmic_integral
from romlab.romanoff import (
    admissible_shift_set,
    build_modulus,
    enumerate_representable_odds,
    gap_statistics,
    hunt_large_multiplicity,
    is_representable,
    romanoff_rep,
)
from romlab.singular import average_over_differences
from romlab.windows import ScanConfig, prime_window_deviation, scan, window_values

from oracles import naive_f_rom, trial_is_prime

SQUARES = LacunaryParams.from_r([2, 2])


def check(log, number, title, budget_s, body):
    start = time.perf_counter()
    ok, detail = body()
    elapsed = time.perf_counter() - start
    within = elapsed < budget_s
    status = "PASS" if ok and within else "FAIL"
    log.append(f"[{status}] criterion {number:>2}: {title} | {detail} | {elapsed:.2f}s (budget {budget_s}s)")
    assert ok, detail
    assert within, f"took {elapsed:.1f}s, budget {budget_s}s"


def test_c01_small_scale_oracle_equivalence(acceptance_log):
    def body():
        X = 10**4
        lset = generate(SQUARES, X)
        res = scan(ScanConfig(X, 0.5, 200, 2024), lset)
        mismatches = 0
        for rec in res.records:
            f = [sum(1 for a in lset.values if trial_is_prime(n - a)) for n in range(rec.x + 1, rec.x + rec.h + 1)]
            naive = (sum(f), sum(v * v for v in f), sum(1 for v in f if v))
            mismatches += window_values(rec.x, rec.h, lset).tolist() != f
            mismatches += (rec.R, rec.Q, rec.S) != naive
        return mismatches == 0, f"200 windows at X=1e4, h={res.config.h}, mismatches={mismatches}"

    check(acceptance_log, 1, "window pipeline == naive double loop", 10, body)


def test_c02_cauchy_schwarz_exact(acceptance_log):
    def body():
        res = scan(ScanConfig(10**8, 0.4, 1000, 42), generate(SQUARES, 10**8))
        bad = [r for r in res.records if not (r.R * r.R <= r.S * r.Q and r.S <= r.R <= r.Q)]
        return not bad, f"1000 windows at X=1e8, theta=0.4, violations={len(bad)}"

    check(acceptance_log, 2, "R^2 <= S*Q and S <= R <= Q on every record", 300, body)


def test_c03_lacunary_size_log_scale(acceptance_log):
    def body():
        ratios = [len(generate(SQUARES, 2**j)) / j for j in (16, 20, 24, 28, 32)]
        spread = max(ratios) / min(ratios)
        return spread <= 3, f"A(X)/log2 X = {[round(r, 4) for r in ratios]}, spread={spread:.3f} <= 3"

    check(acceptance_log, 3, "A(X)/log2 X bounded over X = 2^16..2^32", 1, body)


def test_c04_average_singular_series_scaling(acceptance_log):
    def body():
        norms = [average_over_differences(generate(SQUARES, 2**j)).normalized for j in (20, 24, 28)]
        spread = max(norms) / min(norms)
        return spread <= 2, f"normalized = {[round(v, 4) for v in norms]}, spread={spread:.3f} <= 2"

    check(acceptance_log, 4, "sum S2(a1-a2)/(ln X)^2 stable over X = 2^20, 2^24, 2^28", 30, body)


def test_c05_mean_square_and_concentration(acceptance_log):
    def body():
        res = scan(ScanConfig(10**8, 0.4, 1000, 4242), generate(SQUARES, 10**8))
        q = np.array([r.Q / r.h for r in res.records])
        rh = np.array([r.R / r.h for r in res.records])
        q_ratio = q.max() / np.median(q)
        med = np.median(rh)
        within = float(np.mean((rh >= med / 3) & (rh <= 3 * med)))
        ok = q_ratio <= 10 and within >= 0.99
        return ok, f"max(Q/h)/median(Q/h)={q_ratio:.3f} <= 10, R/h within 3x median: {within:.3f} >= 0.99"

    check(acceptance_log, 5, "no Q/h blow-up; R/h concentrates", 600, body)


def test_c06_prime_window_deviation(acceptance_log):
    def body():
        dev = prime_window_deviation(10**8, 10**4, 1000, 2026)
        p99 = dev.quantiles[0.99]
        return p99 <= 0.5, f"99th percentile delta={p99:.4f} <= 0.5, exceptional={dev.exceptional_fraction}"

    check(acceptance_log, 6, "short-interval prime counts near y/log t", 120, body)


def test_c07_large_multiplicity_hunt(acceptance_log):
    def body():
        d = build_modulus(13)
        assert d.d == 15015 and abs(d.ratio - 2.607) < 1e-3
        res = hunt_large_multiplicity(10**8, 10**6, d)
        recheck = naive_f_rom(res.n)
        ok = recheck == res.multiplicity == romanoff_rep(res.n) and recheck >= 1.5 * res.window_average
        return ok, (f"n={res.n}, f_Rom={recheck} (rechecked), window average={res.window_average:.3f}, "
                    f"ratio={recheck / res.window_average:.3f} >= 1.5")

    check(acceptance_log, 7, "hunt over multiples of 15015 in (1e8, 1e8+1e6]", 120, body)


def test_c08_representable_odds_to_1e6(acceptance_log):
    def body():
        seq = enumerate_representable_odds(10**6)
        gs = gap_statistics(seq)
        has_127 = 127 in set(seq.non_representable.tolist()) and all(
            not trial_is_prime(127 - 2**k) for k in range(1, 7)
        )
        failures = sum(1 for n in seq.values.tolist() if not is_representable(n))
        ok = has_127 and failures == 0 and gs.max_gap >= 4
        return ok, (f"{len(seq)} members, recheck failures={failures}, 127 non-representable={has_127}, "
                    f"max gap={gs.max_gap} at {gs.argmax}")

    check(acceptance_log, 8, "representable odd numbers up to 1e6", 60, body)


def test_c09_admissible_shift_sets(acceptance_log):
    def body():
        results = {}
        for r in (3, 5, 7, 11):
            res = admissible_shift_set(r, 6)
            brute = all(
                len({s % p for s in res.shifts}) < p for p in range(2, r + 1) if trial_is_prime(p)
            )
            results[r] = res.verified and brute
        return all(results.values()), f"verified per r: {results}"

    check(acceptance_log, 9, "shifts -2^(jL) admissible for r in {3,5,7,11}", 1, body)


def test_c10_primes_in_progressions(acceptance_log):
    def body():
        k, x = 105, 10**8
        phi = sum(1 for l in range(k) if math.gcd(l, k) == 1)
        li = logarithmic_integral(x)
        errs = [abs(count_primes_in_ap(0, x, k, l) * phi / li - 1) for l in range(k) if math.gcd(l, k) == 1]
        worst = max(errs)
        return worst <= 0.05, f"{len(errs)} classes mod 105, worst relative error={worst:.5f} <= 0.05"

    check(acceptance_log, 10, "pi(1e8; 105, l) ~ li(1e8)/phi(105)", 60, body)

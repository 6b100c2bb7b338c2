import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from romlab.errors import ArgumentError
from romlab.lacunary import LacunaryParams, LacunarySet, generate
from romlab.windows import (
    ScanConfig,
    WindowRecord,
    iter_scan,
    prime_window_deviation,
    rep_function,
    restricted_first_moment,
    scan,
    window_record,
)

from oracles import naive_window, trial_is_prime

SQUARES = LacunaryParams.from_r([2, 2])
TOY = generate(SQUARES, 16)  # {4, 18, 32}


def custom(values) -> LacunarySet:
    return LacunarySet(SQUARES, 10**6, tuple(sorted(values)))


def test_rep_function_examples():
    assert rep_function(9, TOY) == 1
    assert rep_function(21, TOY) == 2
    assert rep_function(1, TOY) == 0
    assert rep_function(1, generate(SQUARES, 10**9)) == 0


def test_window_record_toy_against_oracle():
    rec = window_record(20, 2, TOY)
    # f(21) = 2 (17, 3 prime), f(22) = 0 (18, 4 composite)
    assert (rec.R, rec.Q, rec.S) == naive_window(20, 2, TOY.values) == (2, 4, 1)
    assert rec.cs_bound == 1


def test_window_record_empty():
    rec = window_record(10, 5, custom([100, 200]))
    assert (rec.R, rec.Q, rec.S, rec.cs_bound) == (0, 0, 0, 0)


@settings(max_examples=60, deadline=None)
@given(
    values=st.sets(st.integers(1, 5000), min_size=1, max_size=5),
    x=st.integers(1, 10**4),
    h=st.integers(1, 300),
)
def test_window_record_matches_naive_loop(values, x, h):
    lset = custom(values)
    rec = window_record(x, h, lset)
    assert (rec.R, rec.Q, rec.S) == naive_window(x, h, lset.values)


@settings(max_examples=60, deadline=None)
@given(x=st.integers(10**6, 10**8), h=st.integers(2, 2000))
def test_record_invariants(x, h):
    lset = generate(SQUARES, 10**8)
    rec = window_record(x, h, lset)
    assert rec.R * rec.R <= rec.S * rec.Q
    assert rec.S <= rec.R <= rec.Q
    assert rec.S <= h


def test_pointwise_bound_by_set_size():
    lset = generate(SQUARES, 10**6)
    assert all(rep_function(n, lset) <= len(lset) for n in range(10**6, 10**6 + 2000))


@settings(max_examples=40, deadline=None)
@given(x=st.integers(1, 10**7), h=st.integers(1, 500))
def test_window_additivity(x, h):
    lset = generate(SQUARES, 10**7)
    assert window_record(x, 2 * h, lset).R == window_record(x, h, lset).R + window_record(x + h, h, lset).R


def test_R_equals_sum_of_shifted_prime_counts():
    from romlab.primes import count_primes_in

    lset = generate(SQUARES, 10**6)
    x, h = 1_234_567, 999
    assert window_record(x, h, lset).R == sum(count_primes_in(x - a, x + h - a) for a in lset.values)


def test_restricted_first_moment_examples():
    assert restricted_first_moment(100, 7, TOY) == 0  # h < 2 min(set)
    # a in {4, 18}: primes in (96, 136] and (82, 122], counted by trial division
    assert restricted_first_moment(100, 40, TOY) == 16
    assert 16 == sum(trial_is_prime(m) for m in range(97, 137)) + sum(trial_is_prime(m) for m in range(83, 123))


def test_restricted_first_moment_never_exceeds_R():
    lset = generate(SQUARES, 10**6)
    rng = random.Random(5)
    for _ in range(1000):
        x, h = rng.randint(10**6, 2 * 10**6), rng.randint(2, 2000)
        assert restricted_first_moment(x, h, lset) <= window_record(x, h, lset).R


def test_scan_config_validation():
    assert ScanConfig(10**8, 0.4, 10, 1).h == 1584
    assert ScanConfig(10**6, 0.5, 10, 1).h == 1000
    for bad in [(10**6, 0.0, 10, 1), (10**6, 1.0, 10, 1), (10**6, 0.5, 0, 1), (3, 0.1, 1, 1)]:
        with pytest.raises(ArgumentError):
            ScanConfig(*bad)


def test_scan_is_deterministic_and_bounded():
    lset = generate(SQUARES, 10**6)
    cfg = ScanConfig(10**6, 0.5, 100, 42)
    a, b = scan(cfg, lset), scan(cfg, lset)
    assert [r.row() for r in a.records] == [r.row() for r in b.records]
    assert all(r.S <= r.h for r in a.records)
    assert all(10**6 <= r.x <= 2 * 10**6 for r in a.records)
    assert a.summary["cs_exact_fraction"] == 1.0
    other = scan(ScanConfig(10**6, 0.5, 100, 43), lset)
    assert [r.x for r in other.records] != [r.x for r in a.records]


def test_scan_worker_count_does_not_change_output():
    lset = generate(SQUARES, 10**6)
    cfg = ScanConfig(10**6, 0.5, 40, 9)
    assert list(iter_scan(cfg, lset, workers=1)) == list(iter_scan(cfg, lset, workers=2))


def test_scan_oracle_equivalence_small_scale():
    lset = generate(SQUARES, 10**4)
    for rec in scan(ScanConfig(10**4, 0.5, 25, 3), lset).records:
        assert (rec.R, rec.Q, rec.S) == naive_window(rec.x, rec.h, lset.values)


@pytest.mark.slow
def test_scan_mean_matches_heuristic():
    lset = generate(SQUARES, 10**8)
    res = scan(ScanConfig(10**8, 0.4, 1000, 11), lset)
    heuristic = len(lset) / math.log(10**8)
    assert heuristic / 3 <= res.summary["R/h"]["mean"] <= 3 * heuristic


def test_summary_fields():
    res = scan(ScanConfig(10**6, 0.5, 20, 1), generate(SQUARES, 10**6))
    for key in ("R/h", "Q/h", "S/h"):
        assert set(res.summary[key]) == {"min", "max", "mean", "median", "std"}
        assert res.summary[key]["min"] <= res.summary[key]["mean"] <= res.summary[key]["max"]


def test_window_record_row():
    assert WindowRecord(10, 4, 3, 5, 2).row() == (10, 4, 3, 5, 2, "1.8")


def test_prime_window_deviation_examples():
    single = prime_window_deviation(1000, 1000, 1, 0)
    assert single.samples == 1 and len(single.deltas) == 1
    a = prime_window_deviation(10**6, 10**3, 50, 8)
    b = prime_window_deviation(10**6, 10**3, 50, 8)
    assert a.as_dict() == b.as_dict()
    assert a.quantiles[0.5] <= a.quantiles[0.9] <= a.quantiles[0.99] <= a.quantiles[1.0]
    with pytest.raises(ArgumentError):
        prime_window_deviation(1000, 2, 5, 0)
    with pytest.raises(ArgumentError):
        prime_window_deviation(1000, 1001, 5, 0)

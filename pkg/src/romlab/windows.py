"""Short-window statistics of the representation function
``f(n) = #{a in A : n - a prime}`` for a lacunary set ``A``.

For a window ``(x, x+h]``: ``R`` is the sum of ``f``, ``Q`` the sum of ``f**2``
and ``S`` the number of ``n`` with ``f(n) >= 1``.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

import numpy as np

from .errors import ArgumentError
from .lacunary import LacunarySet, floor_power, as_exponent
from .primes import count_primes_in, is_prime, prime_flags
from .sampling import sample_integers

WORKERS_ENV = "ROMLAB_WORKERS"


def default_workers() -> int:
    return max(1, int(os.environ.get(WORKERS_ENV, "1")))


@dataclass(frozen=True)
class WindowRecord:
    x: int
    h: int
    R: int
    Q: int
    S: int

    @property
    def cs_bound(self) -> Fraction:
        """Cauchy-Schwarz lower bound R^2/Q for S (0 when Q = 0)."""
        return Fraction(self.R * self.R, self.Q) if self.Q else Fraction(0)

    def row(self) -> tuple:
        return (self.x, self.h, self.R, self.Q, self.S, f"{float(self.cs_bound):.12g}")


CSV_COLUMNS = ("x", "h", "R", "Q", "S", "cs_bound")


@dataclass(frozen=True)
class ScanConfig:
    X: int
    theta: float
    sample_count: int
    seed: int

    def __post_init__(self):
        if not 0 < float(self.theta) < 1:
            raise ArgumentError(f"theta must lie in (0, 1), got {self.theta}")
        if self.sample_count < 1:
            raise ArgumentError(f"sample_count must be >= 1, got {self.sample_count}")
        if not 2 <= self.h <= self.X:
            raise ArgumentError(f"window length h={self.h} must satisfy 2 <= h <= X={self.X}")

    @property
    def h(self) -> int:
        return window_length(self.X, self.theta)


def window_length(X: int, theta) -> int:
    """floor(X**theta), exact for rational theta."""
    return floor_power(int(X), as_exponent(theta))


def rep_function(n: int, lset: LacunarySet) -> int:
    return sum(1 for a in lset.values if n - a >= 2 and is_prime(n - a))


def window_values(x: int, h: int, lset: LacunarySet) -> np.ndarray:
    """``f(n)`` for ``n = x+1, ..., x+h`` as an int64 array."""
    f = np.zeros(h, dtype=np.int64)
    for a in lset.values:
        if x + h - a < 2:
            break
        f += prime_flags(x + 1 - a, x + h + 1 - a)
    return f


def window_record(x: int, h: int, lset: LacunarySet) -> WindowRecord:
    f = window_values(x, h, lset)
    return WindowRecord(x, h, int(f.sum()), int((f * f).sum()), int(np.count_nonzero(f)))


def restricted_first_moment(x: int, h: int, lset: LacunarySet) -> int:
    """Sum over a <= h/2 of the number of primes in (x - a, x + h - a]."""
    return sum(count_primes_in(x - a, x + h - a) for a in lset.values if 2 * a <= h)


def _stats(values: list[float]) -> dict:
    arr = np.asarray(values, dtype=float)
    return {
        "min": float(arr.min()),
        "max": float(arr.max()),
        "mean": math.fsum(values) / len(values),
        "median": float(np.median(arr)),
        "std": float(arr.std()),
    }


@dataclass
class ScanResult:
    config: ScanConfig
    records: list[WindowRecord]
    summary: dict = field(default_factory=dict)


def summarize_records(records: list[WindowRecord]) -> dict:
    h = records[0].h
    out = {
        "windows": len(records),
        "h": h,
        "R/h": _stats([r.R / h for r in records]),
        "Q/h": _stats([r.Q / h for r in records]),
        "S/h": _stats([r.S / h for r in records]),
    }
    tight = sum(1 for r in records if r.S >= 0.999 * float(r.cs_bound))
    out["cs_exact_fraction"] = tight / len(records)
    return out


def sample_points(config: ScanConfig) -> list[int]:
    return sample_integers(config.seed, "scan", config.X, 2 * config.X, config.sample_count)


def _record_batch(args) -> list[WindowRecord]:
    xs, h, lset = args
    return [window_record(x, h, lset) for x in xs]


def iter_scan(config: ScanConfig, lset: LacunarySet, workers: int | None = None) -> Iterator[WindowRecord]:
    """Window records in sampling order, independent of the worker count."""
    xs = sample_points(config)
    h = config.h
    workers = workers or default_workers()
    if workers <= 1:
        for x in xs:
            yield window_record(x, h, lset)
        return
    size = max(1, len(xs) // (4 * workers))
    batches = [(xs[i : i + size], h, lset) for i in range(0, len(xs), size)]
    with ProcessPoolExecutor(workers) as pool:
        for batch in pool.map(_record_batch, batches):
            yield from batch


def scan(config: ScanConfig, lset: LacunarySet, workers: int | None = None) -> ScanResult:
    records = list(iter_scan(config, lset, workers))
    return ScanResult(config, records, summarize_records(records))


@dataclass
class DeviationSummary:
    X: int
    y: int
    samples: int
    quantiles: dict
    exceptional_fraction: float
    deltas: list[float] = field(repr=False, default_factory=list)

    def as_dict(self) -> dict:
        return {
            "X": self.X,
            "y": self.y,
            "samples": self.samples,
            "quantiles": {str(q): v for q, v in self.quantiles.items()},
            "exceptional_fraction": self.exceptional_fraction,
        }


DEVIATION_QUANTILES = (0.5, 0.9, 0.99, 1.0)
EXCEPTIONAL_DELTA = 0.5


def prime_window_deviation(X: int, y: int, sample_count: int, seed: int) -> DeviationSummary:
    """Relative deviation of pi(t+y) - pi(t) from y/log t at sampled t in [X, 2X]."""
    if not 3 <= y <= X:
        raise ArgumentError(f"need 3 <= y <= X, got y={y}, X={X}")
    if sample_count < 1:
        raise ArgumentError("sample_count must be >= 1")
    deltas = []
    for t in sample_integers(seed, "prime-dev", X, 2 * X, sample_count):
        expected = y / math.log(t)
        deltas.append(abs(count_primes_in(t, t + y) - expected) / expected)
    arr = np.asarray(deltas)
    quantiles = {q: float(np.quantile(arr, q)) for q in DEVIATION_QUANTILES}
    exceptional = float(np.count_nonzero(arr > EXCEPTIONAL_DELTA)) / len(deltas)
    return DeviationSummary(X, y, sample_count, quantiles, exceptional, deltas)

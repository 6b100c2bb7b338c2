"""Representations n = p + 2^k: the multiplicity function, smooth-modulus hunts
for large multiplicities in short windows, admissible shift sets and the
sequence of representable odd numbers with its gaps."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ArgumentError, ModulusOverflowError
from .primes import base_primes, is_prime, prime_flags
from .sampling import sample_integers
from .windows import window_length

_CHUNK = 1 << 22


@dataclass(frozen=True)
class RomanoffConvention:
    """Smallest allowed power: k_min = 1 excludes 2^0 = 1."""

    k_min: int = 1

    def __post_init__(self):
        if self.k_min not in (0, 1):
            raise ArgumentError(f"k_min must be 0 or 1, got {self.k_min}")


DEFAULT_CONVENTION = RomanoffConvention(1)


def romanoff_rep(n: int, conv: RomanoffConvention = DEFAULT_CONVENTION) -> int:
    """#{k >= k_min : 2^k < n and n - 2^k prime}."""
    if n < 2:
        raise ArgumentError(f"n must be >= 2, got {n}")
    count, k = 0, conv.k_min
    while (1 << k) < n:
        count += is_prime(n - (1 << k))
        k += 1
    return count


def is_representable(n: int, conv: RomanoffConvention = DEFAULT_CONVENTION) -> bool:
    k = conv.k_min
    while (1 << k) < n:
        if is_prime(n - (1 << k)):
            return True
        k += 1
    return False


def multiplicities(
    lo: int, hi: int, ns: np.ndarray, conv: RomanoffConvention = DEFAULT_CONVENTION, method: str = "auto"
) -> np.ndarray:
    """f_Rom(n) for every n in ``ns``; all of ``ns`` must lie in (lo, hi].

    ``method="sieve"`` sieves each shifted window, ``"direct"`` tests each
    n - 2^k with Miller-Rabin; ``"auto"`` picks by target density.
    """
    ns = np.asarray(ns, dtype=np.int64)
    out = np.zeros(ns.size, dtype=np.int64)
    if ns.size == 0:
        return out
    if method == "direct" or (method == "auto" and ns.size * 64 < hi - lo):
        # few sparse targets: direct primality beats sieving every shifted window
        return np.array([romanoff_rep(int(n), conv) for n in ns], dtype=np.int64)
    idx = ns - (lo + 1)
    k = conv.k_min
    while (1 << k) < hi:
        shift = 1 << k
        out += prime_flags(lo + 1 - shift, hi + 1 - shift)[idx]
        k += 1
    return out


@dataclass(frozen=True)
class SmoothModulus:
    d: int
    prime_list: tuple[int, ...]
    phi: int

    @property
    def ratio(self) -> float:
        return self.d / self.phi


def build_modulus(prime_bound: float, excluded: Sequence[int] = ()) -> SmoothModulus:
    """Product of the odd primes 3 <= p <= prime_bound that are not excluded."""
    if prime_bound < 3:
        raise ArgumentError(f"prime_bound must be >= 3, got {prime_bound}")
    skip = set(excluded)
    ps = tuple(p for p in base_primes(int(prime_bound)).tolist() if p > 2 and p not in skip)
    d = math.prod(ps)
    if d >= 1 << 64:
        raise ModulusOverflowError(f"modulus from primes <= {prime_bound} exceeds 64 bits; use a smaller bound")
    return SmoothModulus(d, ps, math.prod(p - 1 for p in ps))


@dataclass(frozen=True)
class HuntResult:
    n: int | None
    multiplicity: int
    window_average: float
    multiples: int
    window_sum: int

    @property
    def found(self) -> bool:
        return self.n is not None

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "multiplicity": self.multiplicity,
            "window_average": self.window_average,
            "multiples": self.multiples,
            "window_sum": self.window_sum,
        }


def _multiples(d: int, lo: int, hi: int) -> np.ndarray:
    first = (lo // d + 1) * d
    return np.arange(first, hi + 1, d, dtype=np.int64)


def hunt_large_multiplicity(
    X: int, window_length: int, d: SmoothModulus, conv: RomanoffConvention = DEFAULT_CONVENTION
) -> HuntResult:
    """Maximize f_Rom over the multiples of d in (X, X + window_length].

    Ties go to the smallest n. The average is over the same multiples.
    """
    if window_length < d.d:
        raise ArgumentError(f"window length {window_length} is shorter than the modulus {d.d}")
    best_n, best, total, count = None, -1, 0, 0
    for lo in range(X, X + window_length, _CHUNK):
        hi = min(lo + _CHUNK, X + window_length)
        ns = _multiples(d.d, lo, hi)
        if ns.size == 0:
            continue
        f = multiplicities(lo, hi, ns, conv, method="sieve")
        i = int(np.argmax(f))
        if f[i] > best:
            best_n, best = int(ns[i]), int(f[i])
        total += int(f.sum())
        count += ns.size
    if count == 0:
        return HuntResult(None, 0, 0.0, 0, 0)
    return HuntResult(best_n, best, total / count, count, total)


@dataclass
class ProportionResult:
    fraction: float
    threshold: int
    h: int
    samples: int
    mean_multiplicity: float
    window_sums: list[int] = field(repr=False, default_factory=list)
    window_maxima: list[int] = field(repr=False, default_factory=list)

    def as_dict(self) -> dict:
        sums = np.asarray(self.window_sums, dtype=float)
        return {
            "fraction": self.fraction,
            "threshold": self.threshold,
            "h": self.h,
            "samples": self.samples,
            "mean_multiplicity": self.mean_multiplicity,
            "S_d": {
                "min": float(sums.min()),
                "max": float(sums.max()),
                "mean": math.fsum(self.window_sums) / len(self.window_sums),
            },
        }


def positive_proportion_scan(
    X: int,
    theta,
    d: SmoothModulus,
    threshold: int | str,
    sample_count: int,
    seed: int,
    conv: RomanoffConvention = DEFAULT_CONVENTION,
) -> ProportionResult:
    """Fraction of sampled x in (X, 2X] whose window (x, x+h] holds a multiple n of d
    with f_Rom(n) >= threshold.

    ``threshold="auto"`` uses ceil(2 * mean f_Rom) over all scanned multiples.
    """
    h = window_length(X, theta)
    if h < d.d:
        raise ArgumentError(f"h = {h} is smaller than the modulus {d.d}; no multiple is guaranteed")
    if sample_count < 1:
        raise ArgumentError("sample_count must be >= 1")
    sums, maxima, total, count = [], [], 0, 0
    for x in sample_integers(seed, "proportion", X + 1, 2 * X, sample_count):
        f = multiplicities(x, x + h, _multiples(d.d, x, x + h), conv)
        sums.append(int(f.sum()))
        maxima.append(int(f.max()))
        total += int(f.sum())
        count += f.size
    mean = total / count
    if threshold == "auto":
        threshold = math.ceil(2 * mean)
    threshold = int(threshold)
    hits = sum(1 for m in maxima if m >= threshold)
    return ProportionResult(hits / sample_count, threshold, h, sample_count, mean, sums, maxima)


@dataclass(frozen=True)
class AdmissibleShifts:
    L: int
    exponents: tuple[int, ...]
    shifts: tuple[int, ...]
    verified: bool
    residues: dict = field(default_factory=dict)
    beyond: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "L": self.L,
            "exponents": list(self.exponents),
            "verified": self.verified,
            "residues": {str(p): sorted(v) for p, v in self.residues.items()},
            "beyond": {str(p): ok for p, ok in self.beyond.items()},
        }


def _covers_all(shifts, p: int) -> tuple[bool, set[int]]:
    classes = {s % p for s in shifts}
    return len(classes) == p, classes


def admissible_shift_set(r: int, count: int, extra_primes: int = 3) -> AdmissibleShifts:
    """Shifts -2^(jL), j = 1..count, with L = lcm of p - 1 over primes p <= r.

    ``verified`` is the brute-force check that the shifts miss a residue class
    modulo every prime p <= r; ``beyond`` reports the same check for the next
    few primes for information only.
    """
    if r < 2 or count < 1:
        raise ArgumentError(f"need r >= 2 and count >= 1, got r={r}, count={count}")
    small = base_primes(r).tolist()
    L = math.lcm(*(p - 1 for p in small))
    exponents = tuple(L * j for j in range(1, count + 1))
    shifts = tuple(-(1 << e) for e in exponents)
    residues, verified = {}, True
    for p in small:
        full, classes = _covers_all(shifts, p)
        residues[p] = classes
        verified &= not full
    beyond = {}
    q = r + 1
    while len(beyond) < extra_primes:
        if is_prime(q):
            beyond[q] = not _covers_all(shifts, q)[0]
        q += 1
    return AdmissibleShifts(L, exponents, shifts, verified, residues, beyond)


@dataclass
class RepresentableSequence:
    limit: int
    values: np.ndarray
    non_representable: np.ndarray
    conv: RomanoffConvention = DEFAULT_CONVENTION

    @property
    def gaps(self) -> np.ndarray:
        return np.diff(self.values)

    def __len__(self) -> int:
        return int(self.values.size)


def enumerate_representable_odds(limit: int, conv: RomanoffConvention = DEFAULT_CONVENTION) -> RepresentableSequence:
    """Odd n <= limit that are p + 2^k, plus the odd n in [3, limit] that are not."""
    if limit < 5:
        raise ArgumentError(f"limit must be >= 5, got {limit}")
    ps = np.flatnonzero(prime_flags(0, limit + 1))
    rep = np.zeros(limit + 1, dtype=bool)
    k = conv.k_min
    while (1 << k) < limit:
        shift = 1 << k
        rep[ps[: np.searchsorted(ps, limit - shift, side="right")] + shift] = True
        k += 1
    odd = np.arange(3, limit + 1, 2, dtype=np.int64)
    mask = rep[odd]
    return RepresentableSequence(limit, odd[mask], odd[~mask], conv)


@dataclass
class GapStatistics:
    max_gap: int
    argmax: int
    normalized: np.ndarray = field(repr=False)

    def rows(self, seq: RepresentableSequence):
        """(m, s_m, gap, normalized) rows, m counted from 1."""
        vals, gaps = seq.values, seq.gaps
        for m in range(gaps.size):
            yield m + 1, int(vals[m]), int(gaps[m]), float(self.normalized[m])


def gap_statistics(seq: RepresentableSequence) -> GapStatistics:
    """Largest gap s_{m+1} - s_m, where it starts, and all gaps over (ln s_m)^2."""
    if len(seq) < 2:
        raise ArgumentError("need at least two representable values")
    gaps = seq.gaps
    i = int(np.argmax(gaps))
    normalized = gaps / np.log(seq.values[:-1].astype(float)) ** 2
    return GapStatistics(int(gaps[i]), int(seq.values[i]), normalized)

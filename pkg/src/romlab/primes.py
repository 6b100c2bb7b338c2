"""Exact prime infrastructure: odd-only segmented sieve, interval counts,
counts in arithmetic progressions, deterministic Miller-Rabin and li(x).

All interval counts use the half-open convention ``(lo, hi]``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate

from .errors import ArgumentError, SegmentSizeError

DEFAULT_SEGMENT_SIZE = 1 << 25

# Bases 2..37 are a deterministic witness set for n < 3.3e24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_SMALL_PRIMES = _MR_BASES + (41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97)

_base_cache = np.array([2, 3, 5, 7], dtype=np.int64)
_base_limit = 10


def base_primes(limit: int) -> np.ndarray:
    """All primes <= limit as an int64 array (cached, grows on demand)."""
    global _base_cache, _base_limit
    if limit > _base_limit:
        n = max(limit, 2 * _base_limit)
        flags = np.ones(n + 1, dtype=bool)
        flags[:2] = False
        flags[4::2] = False
        for p in range(3, math.isqrt(n) + 1, 2):
            if flags[p]:
                flags[p * p :: 2 * p] = False
        _base_cache = np.flatnonzero(flags).astype(np.int64)
        _base_limit = n
    return _base_cache[: np.searchsorted(_base_cache, limit, side="right")]


def _odd_flags(lo: int, hi: int) -> tuple[int, np.ndarray]:
    """Primality flags for the odd integers in [lo, hi).

    Returns ``(first_odd, flags)`` with ``flags[i]`` describing ``first_odd + 2*i``.
    Requires ``lo >= 0``.
    """
    first = lo | 1
    n = (hi - first + 1) // 2 if hi > first else 0
    flags = np.ones(max(n, 0), dtype=bool)
    if n == 0:
        return first, flags
    if first == 1:
        flags[0] = False
    last = first + 2 * (n - 1)
    odd = base_primes(math.isqrt(last))[1:]
    if odd.size == 0:
        return first, flags
    # first odd multiple of p that is >= max(p*p, first)
    start = np.maximum(odd * odd, (first + odd - 1) // odd * odd)
    start += np.where(start % 2 == 0, odd, 0)
    idx = (start - first) // 2
    split = np.searchsorted(odd, n)
    for p, i in zip(odd[:split].tolist(), idx[:split].tolist()):
        flags[i::p] = False
    # primes >= n hit the segment at most once
    hit = idx[split:]
    flags[hit[hit < n]] = False
    return first, flags


def prime_flags(lo: int, hi: int) -> np.ndarray:
    """Boolean array ``a`` with ``a[i]`` true iff ``lo + i`` is prime, for [lo, hi).

    Negative ``lo`` is allowed; negative integers are never prime.
    """
    if hi <= lo:
        return np.zeros(0, dtype=bool)
    out = np.zeros(hi - lo, dtype=bool)
    start = max(lo, 0)
    if start >= hi:
        return out
    first, odd = _odd_flags(start, hi)
    out[first - lo :: 2][: odd.size] = odd
    if start <= 2 < hi:
        out[2 - lo] = True
    return out


@dataclass(frozen=True, eq=False)
class PrimeSegment:
    """Primality table for [lo, hi): one bit per odd integer plus a flag for 2."""

    lo: int
    hi: int
    bits: np.ndarray
    has_two: bool

    @property
    def first_odd(self) -> int:
        return self.lo | 1

    @property
    def odd_count(self) -> int:
        return max((self.hi - self.first_odd + 1) // 2, 0)

    def _odd(self) -> np.ndarray:
        return np.unpackbits(self.bits, count=self.odd_count, bitorder="little").astype(bool)

    def is_prime(self, m: int) -> bool:
        if not self.lo <= m < self.hi:
            raise ArgumentError(f"{m} outside segment [{self.lo}, {self.hi})")
        if m == 2:
            return self.has_two
        if m % 2 == 0:
            return False
        i = (m - self.first_odd) // 2
        return bool((self.bits[i >> 3] >> (i & 7)) & 1)

    __contains__ = is_prime

    def primes(self) -> np.ndarray:
        odd = self.first_odd + 2 * np.flatnonzero(self._odd()).astype(np.int64)
        if self.has_two:
            return np.concatenate(([2], odd)).astype(np.int64)
        return odd

    def count(self) -> int:
        return int(np.unpackbits(self.bits).sum()) + int(self.has_two)


def sieve_segment(lo: int, hi: int, *, segment_size: int = DEFAULT_SEGMENT_SIZE) -> PrimeSegment:
    if lo < 0 or lo >= hi:
        raise ArgumentError(f"need 0 <= lo < hi, got lo={lo}, hi={hi}")
    if hi - lo > segment_size:
        raise SegmentSizeError(f"range of {hi - lo} exceeds segment size {segment_size}")
    _, odd = _odd_flags(lo, hi)
    bits = np.packbits(odd, bitorder="little")
    return PrimeSegment(lo, hi, bits, lo <= 2 < hi)


def is_prime(n: int) -> bool:
    """Deterministic primality for every n < 3.3e24 (covers all 64-bit inputs)."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    if n < 97 * 97:
        return True
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _chunks(lo: int, hi: int, size: int):
    """Split (lo, hi] into [a, b) sieve ranges of at most ``size`` integers."""
    a = lo + 1
    while a <= hi:
        b = min(a + size, hi + 1)
        yield a, b
        a = b


def count_primes_in(lo: int, hi: int, *, segment_size: int = DEFAULT_SEGMENT_SIZE) -> int:
    """Number of primes p with lo < p <= hi."""
    if lo > hi:
        raise ArgumentError(f"lo={lo} exceeds hi={hi}")
    total = 0
    for a, b in _chunks(max(lo, 0), hi, segment_size):
        total += int(np.count_nonzero(_odd_flags(a, b)[1]))
        total += a <= 2 < b
    return total


def primes_between(lo: int, hi: int, *, segment_size: int = DEFAULT_SEGMENT_SIZE):
    """Yield int64 arrays of the primes in (lo, hi], one array per sieve chunk."""
    for a, b in _chunks(max(lo, 0), hi, segment_size):
        first, odd = _odd_flags(a, b)
        ps = first + 2 * np.flatnonzero(odd).astype(np.int64)
        if a <= 2 < b:
            ps = np.concatenate(([2], ps)).astype(np.int64)
        yield ps


@lru_cache(maxsize=16)
def _residue_counts(lo: int, hi: int, k: int) -> tuple[int, ...]:
    counts = np.zeros(k, dtype=np.int64)
    for ps in primes_between(lo, hi):
        counts += np.bincount(ps % k, minlength=k)
    return tuple(int(c) for c in counts)


def count_primes_by_residue(lo: int, hi: int, k: int) -> list[int]:
    """Counts of primes in (lo, hi] in each residue class mod k (index = residue)."""
    if k < 1:
        raise ArgumentError(f"modulus must be >= 1, got {k}")
    if lo > hi:
        raise ArgumentError(f"lo={lo} exceeds hi={hi}")
    return list(_residue_counts(lo, hi, k))


def count_primes_in_ap(lo: int, hi: int, k: int, residue: int) -> int:
    """Number of primes p = residue (mod k) with lo < p <= hi; needs gcd(residue, k) = 1."""
    if k < 1 or not 0 <= residue < k:
        raise ArgumentError(f"need k >= 1 and 0 <= residue < k, got k={k}, residue={residue}")
    if math.gcd(residue, k) != 1:
        raise ArgumentError(f"residue {residue} is not coprime to modulus {k}")
    if lo > hi:
        raise ArgumentError(f"lo={lo} exceeds hi={hi}")
    if lo == hi:
        return 0
    return _residue_counts(lo, hi, k)[residue]


def logarithmic_integral(x: float) -> float:
    """Offset logarithmic integral: integral of dt/log t from 2 to x."""
    if not x >= 2:
        raise ArgumentError(f"logarithmic integral needs x >= 2, got {x}")
    if x == 2:
        return 0.0
    # t = e^u turns the integrand into e^u/u, smooth on [log 2, log x]
    val, _ = integrate.quad(
        lambda u: math.exp(u) / u, math.log(2.0), math.log(x), epsabs=0.0, epsrel=1e-12, limit=200
    )
    return val


"""Prime-pair singular series, the twin-prime constant, the small-prime divisor
sum over differences, and direct prime-pair counts in short intervals."""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ArgumentError
from .lacunary import LacunarySet, differences
from .primes import base_primes, is_prime, prime_flags, primes_between

DEFAULT_C2_BOUND = 10**8
_TRIAL_LIMIT = 10**6


@dataclass(frozen=True)
class TwinPrimeConstant:
    value: float
    truncation_bound: int
    tail_bound: float


def _odd_prime_tail(P: int) -> float:
    """Upper bound for the sum of 1/(p-1)^2 over primes p > P.

    Primes beyond P are odd, so p - 1 runs over even numbers >= P; the sum of
    1/m^2 over even m >= 2J is at most 1/(4(J-1)).
    """
    J = (P + 1) // 2
    return 1.0 / (4 * (J - 1))


@lru_cache(maxsize=8)
def twin_prime_constant(P: int = DEFAULT_C2_BOUND) -> TwinPrimeConstant:
    """Product of 1 - 1/(p-1)^2 over odd primes p <= P, with a certified tail."""
    if P < 10**3:
        raise ArgumentError(f"truncation bound must be >= 1000, got {P}")
    logs = []
    for ps in primes_between(2, P):
        q = (ps - 1).astype(float)
        logs.append(math.fsum(np.log1p(-1.0 / (q * q)).tolist()))
    value = math.exp(math.fsum(logs))
    # 1 - prod(1 - t_i) <= sum t_i for the omitted factors
    return TwinPrimeConstant(value, P, value * _odd_prime_tail(P))


def factorize(n: int) -> dict[int, int]:
    """Prime factorization of |n| (n != 0): trial division, then Pollard-Brent."""
    n = abs(n)
    if n == 0:
        raise ArgumentError("cannot factor 0")
    out: dict[int, int] = {}
    limit = min(math.isqrt(n), _TRIAL_LIMIT)
    for p in base_primes(limit).tolist():
        if p * p > n:
            break
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if is_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        d = _brent(m)
        stack += [d, m // d]
    return dict(sorted(out.items()))


def _brent(n: int) -> int:
    if n % 2 == 0:
        return 2
    rng = random.Random(n)
    while True:
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g = r = q = 1
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


def odd_prime_divisors(n: int) -> list[int]:
    return [p for p in factorize(n) if p > 2]


@dataclass(frozen=True)
class SingularValue:
    delta: int
    value: float


def singular_series(delta: int, c2: TwinPrimeConstant | None = None) -> SingularValue:
    """S2(delta) = 2 C2 prod_{p | delta, p > 2} (p-1)/(p-2) for even delta, 0 for odd."""
    if delta == 0:
        raise ArgumentError("the singular series is not defined at delta = 0")
    if delta % 2:
        return SingularValue(delta, 0.0)
    c2 = c2 or twin_prime_constant()
    factor = 1.0
    for p in odd_prime_divisors(delta):
        factor *= (p - 1) / (p - 2)
    return SingularValue(delta, 2 * c2.value * factor)


def small_prime_divisor_sum(delta: int, threshold: float) -> float:
    """Sum of 1/d over odd squarefree d | delta whose prime factors are all < threshold.

    Evaluated as the Euler product of (1 + 1/p). With P+(1) = 1, d = 1
    contributes whenever threshold > 1.
    """
    if delta < 1:
        raise ArgumentError(f"delta must be >= 1, got {delta}")
    if threshold <= 1:
        return 0.0
    out = 1.0
    for p in odd_prime_divisors(delta):
        if p < threshold:
            out *= 1 + 1 / p
    return out


@dataclass(frozen=True)
class DifferenceAverage:
    total: float
    normalized: float
    divisor_sum_aggregate: float
    pairs: int

    def as_dict(self) -> dict:
        return {
            "total": self.total,
            "normalized": self.normalized,
            "divisor_sum_aggregate": self.divisor_sum_aggregate,
            "pairs": self.pairs,
        }


def average_over_differences(lset: LacunarySet) -> DifferenceAverage:
    """Sum of S2(a1 - a2) over ordered pairs a1 != a2, and its (ln X)^2 normalization."""
    if len(lset) < 2:
        raise ArgumentError("need at least two elements")
    c2 = twin_prime_constant()
    threshold = math.log(2 * lset.X)
    values, divisor_terms = [], []
    for delta in differences(lset):
        values.append(singular_series(delta, c2).value)
        divisor_terms.append(small_prime_divisor_sum(abs(delta), threshold))
    total = 2 * math.fsum(values)
    return DifferenceAverage(
        total=total,
        normalized=total / math.log(lset.X) ** 2,
        divisor_sum_aggregate=math.fsum(divisor_terms),
        pairs=len(values),
    )


@dataclass(frozen=True)
class PairCount:
    count: int
    prediction: float
    ratio: float


def pair_count_vs_prediction(y: int, h: int, delta: int) -> PairCount:
    """Exact #{y < m <= y+h : m and m+delta prime} against h S2(delta)/(log h)^2 + 1."""
    if h < 2:
        raise ArgumentError(f"h must be >= 2, got {h}")
    if delta == 0:
        raise ArgumentError("delta = 0 is the diagonal; count single primes instead")
    m = prime_flags(y + 1, y + h + 1)
    shifted = prime_flags(y + 1 + delta, y + h + 1 + delta)
    count = int(np.count_nonzero(m & shifted))
    prediction = h / math.log(h) ** 2 * singular_series(delta).value + 1
    return PairCount(count, prediction, count / prediction)

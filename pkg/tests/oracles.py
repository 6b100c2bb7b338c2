"""Brute-force references kept independent of the library code paths."""
import math


def trial_is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for d in range(3, math.isqrt(n) + 1, 2):
        if n % d == 0:
            return False
    return True


def trial_primes(lo: int, hi: int) -> list[int]:
    """Primes in [lo, hi)."""
    return [m for m in range(max(lo, 0), hi) if trial_is_prime(m)]


def naive_window(x: int, h: int, values) -> tuple[int, int, int]:
    R = Q = S = 0
    for n in range(x + 1, x + h + 1):
        f = sum(1 for a in values if trial_is_prime(n - a))
        R += f
        Q += f * f
        S += f > 0
    return R, Q, S


def naive_f_rom(n: int, k_min: int = 1) -> int:
    return sum(1 for k in range(k_min, n.bit_length() + 1) if 2**k < n and trial_is_prime(n - 2**k))


def odd_squarefree_divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1, 2) if n % d == 0 and all(d % (p * p) for p in range(3, math.isqrt(d) + 1, 2))]


def largest_prime_factor(n: int) -> int:
    if n == 1:
        return 1
    best, p = 1, 2
    while p * p <= n:
        while n % p == 0:
            best, n = p, n // p
        p += 1
    return max(best, n) if n > 1 else best

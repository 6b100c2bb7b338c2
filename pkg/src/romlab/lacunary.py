"""Lacunary sets of sums of powers of two with polynomially growing exponents.

An element is ``2**e_1 + ... + 2**e_s`` with ``e_i = floor(k_i**r_i)`` for
``i < s`` and ``e_s = floor(floor(k_s**lam)**r_s)``, all ``k_i >= 1``.
The exponent ``lam`` is fixed by the balance
``1/r_1 + ... + 1/r_{s-1} + 1/(lam*r_s) = 1``.
"""
from __future__ import annotations

import bisect
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational, Real
from typing import Iterator, Sequence

import mpmath

from .errors import ArgumentError, InvalidParamsError

BALANCE_TOL = 1e-12
_NEAR_INT = 1e-9
_MAX_EXACT_DENOMINATOR = 10**6


@dataclass(frozen=True)
class Violation:
    """Which exponent condition failed: ``rule`` is one of
    ``"length"``, ``"r>1"``, ``"prefix<1"``, ``"total>=1"``, ``"balance"``."""

    rule: str
    detail: str


def as_exponent(value) -> Fraction | float:
    """Normalize an exponent to an exact Fraction when that is cheap.

    Strings like ``"3/2"`` or ``"1.5"`` and ints parse exactly; floats go via
    their shortest repr. Values whose denominator is too large to root exactly
    stay floats.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, Real):
        frac = Fraction(repr(float(value)))
        return frac if frac.denominator <= _MAX_EXACT_DENOMINATOR else float(value)
    raise TypeError(f"cannot use {value!r} as an exponent")


def validate_params(r: Sequence) -> Violation | None:
    """Return None when ``r`` is admissible exponent data, else the first violation."""
    if len(r) < 2:
        return Violation("length", f"need at least 2 exponents, got {len(r)}")
    rs = [as_exponent(v) for v in r]
    for i, v in enumerate(rs, 1):
        if not v > 1:
            return Violation("r>1", f"r_{i} = {v} must exceed 1")
    prefix = sum(Fraction(1) / Fraction(v) for v in rs[:-1])
    total = prefix + Fraction(1) / Fraction(rs[-1])
    if not prefix < 1:
        return Violation("prefix<1", f"sum of 1/r_i over i<s is {float(prefix):.6g}, must be < 1")
    if not total >= 1:
        return Violation("total>=1", f"sum of 1/r_i is {float(total):.6g}, must be >= 1")
    return None


def solve_lambda(r: Sequence) -> Fraction | float:
    violation = validate_params(r)
    if violation is not None:
        raise InvalidParamsError(violation)
    rs = [as_exponent(v) for v in r]
    prefix = sum(Fraction(1) / Fraction(v) for v in rs[:-1])
    lam = 1 / (Fraction(rs[-1]) * (1 - prefix))
    return lam if lam.denominator <= _MAX_EXACT_DENOMINATOR else float(lam)


@dataclass(frozen=True)
class LacunaryParams:
    r: tuple
    lam: Fraction | float

    @property
    def s(self) -> int:
        return len(self.r)

    @classmethod
    def from_r(cls, r: Sequence, lam=None) -> "LacunaryParams":
        """Validate ``r`` and solve for ``lam`` (or check a supplied one)."""
        solved = solve_lambda(r)
        rs = tuple(as_exponent(v) for v in r)
        if lam is None or lam == "auto":
            return cls(rs, solved)
        lam = as_exponent(lam)
        balance = sum(1 / float(v) for v in rs[:-1]) + 1 / (float(lam) * float(rs[-1]))
        if abs(balance - 1) > BALANCE_TOL:
            raise InvalidParamsError(
                Violation("balance", f"lambda={lam} leaves balance residual {balance - 1:.3g}")
            )
        return cls(rs, lam)

    def describe(self) -> dict:
        return {
            "s": self.s,
            "r": [str(v) for v in self.r],
            "lambda": str(self.lam),
        }


def _iroot(n: int, q: int) -> int:
    """floor(n ** (1/q)) for n >= 0."""
    if n < 2 or q == 1:
        return n
    x = 1 << -(-n.bit_length() // q)
    while True:
        y = ((q - 1) * x + n // x ** (q - 1)) // q
        if y >= x:
            break
        x = y
    while x**q > n:
        x -= 1
    while (x + 1) ** q <= n:
        x += 1
    return x


def floor_power(k: int, r: Fraction | float) -> int:
    """Exact floor(k**r) for integer k >= 1 and real r > 0."""
    v = k ** float(r)
    if abs(v - round(v)) > _NEAR_INT * max(1.0, v):
        return math.floor(v)
    if isinstance(r, Fraction) and r.denominator <= _MAX_EXACT_DENOMINATOR:
        return _iroot(k**r.numerator, r.denominator)
    dps = 40
    while True:
        with mpmath.workdps(dps):
            w = mpmath.power(k, mpmath.mpf(r))
            f = int(mpmath.floor(w))
            if abs(w - f) > mpmath.mpf(10) ** (10 - dps) and abs(w - f - 1) > mpmath.mpf(10) ** (10 - dps):
                return f
        if dps > 640:
            return f
        dps *= 2


def exponent_lists(params: LacunaryParams, max_exponent: int) -> list[list[int]]:
    """Distinct exponents ``e_i <= max_exponent`` reachable in each coordinate."""
    out = []
    for i, r in enumerate(params.r):
        last = i == params.s - 1
        seen: list[int] = []
        for k in itertools.count(1):
            base = floor_power(k, params.lam) if last else k
            e = floor_power(base, r)
            if e > max_exponent:
                break
            if not seen or seen[-1] != e:
                seen.append(e)
        out.append(seen)
    return out


def enumerate_sums(params: LacunaryParams, bound: int) -> list[int]:
    """Sorted distinct set elements ``<= bound``."""
    if bound < 1:
        return []
    lists = exponent_lists(params, bound.bit_length() - 1)
    if any(not lst for lst in lists):
        return []
    # smallest achievable contribution of coordinates i..s-1
    tail_min = [0] * (params.s + 1)
    for i in range(params.s - 1, -1, -1):
        tail_min[i] = tail_min[i + 1] + (1 << lists[i][0])
    found: set[int] = set()

    def walk(i: int, acc: int) -> None:
        if i == params.s:
            found.add(acc)
            return
        for e in lists[i]:
            nxt = acc + (1 << e)
            if nxt + tail_min[i + 1] > bound:
                break
            walk(i + 1, nxt)

    walk(0, 0)
    return sorted(found)


@dataclass(frozen=True)
class LacunarySet:
    """The truncation of the set to ``[1, 2X]``, sorted and deduplicated."""

    params: LacunaryParams
    X: int
    values: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def counting_function(self, x: float) -> int:
        return counting_function(self, x)

    def differences(self) -> Iterator[int]:
        return differences(self)


def generate(params: LacunaryParams, X: int) -> LacunarySet:
    X = int(X)
    if X < 3:
        raise ArgumentError(f"scale X must be >= 3, got {X}")
    if 2 * X >= 1 << 64:
        raise ArgumentError("2X must fit in 64 bits")
    return LacunarySet(params, X, tuple(enumerate_sums(params, 2 * X)))


def counting_function(lset: LacunarySet, x: float) -> int:
    """Number of elements <= x, for 1 <= x <= 2X."""
    if not 1 <= x <= 2 * lset.X:
        raise ArgumentError(f"x={x} outside [1, {2 * lset.X}]")
    return bisect.bisect_right(lset.values, math.floor(x))


def differences(lset: LacunarySet) -> Iterator[int]:
    """Yield a2 - a1 over unordered pairs a1 < a2 (lexicographic in the pair)."""
    vals = lset.values
    for i, a1 in enumerate(vals):
        for a2 in vals[i + 1 :]:
            yield a2 - a1

"""Exact divisor arithmetic on naturals.

Values are plain Python ints. Operations documented as 64-bit check their
inputs and results against 2^64 and raise instead of wrapping.
"""

from __future__ import annotations

import math
import random
from array import array
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

import numpy as np

from .errors import DivisorCapExceeded, DomainError, Nat64Overflow
from .primality import U64_LIMIT, is_prime_u64

TRIAL_DIVISION_BOUND = 10**6
DIVISOR_CAP = 1 << 20
# n below this is factored by smallest-prime-factor lookup instead of trial division.
SPF_TABLE_LIMIT = 1 << 21


def check_nat64(n: int, name: str = "n") -> int:
    """Validate 1 <= n < 2^64 and return n."""
    if not isinstance(n, int) or isinstance(n, bool):
        raise DomainError(f"{name} must be an int, got {type(n).__name__}")
    if n < 1:
        raise DomainError(f"{name} must be >= 1, got {n}")
    if n >= U64_LIMIT:
        raise Nat64Overflow(f"{name} = {n} does not fit in 64 bits")
    return n


@lru_cache(maxsize=1)
def _trial_primes() -> tuple[int, ...]:
    bound = TRIAL_DIVISION_BOUND
    flags = bytearray([1]) * (bound + 1)
    flags[0] = flags[1] = 0
    for i in range(2, math.isqrt(bound) + 1):
        if flags[i]:
            flags[i * i :: i] = bytes(len(range(i * i, bound + 1, i)))
    return tuple(i for i, f in enumerate(flags) if f)


@lru_cache(maxsize=1)
def _spf_table() -> array:
    spf = np.zeros(SPF_TABLE_LIMIT, dtype=np.int32)
    for p in _trial_primes():
        if p * p >= SPF_TABLE_LIMIT:
            break
        block = spf[p * p :: p]
        block[block == 0] = p
    spf[spf == 0] = np.arange(SPF_TABLE_LIMIT, dtype=np.int32)[spf == 0]
    return array("i", spf.tobytes())


@dataclass(frozen=True)
class Factorization:
    """Prime-power decomposition, primes strictly increasing."""

    factors: tuple[tuple[int, int], ...]

    @property
    def value(self) -> int:
        out = 1
        for p, e in self.factors:
            out *= p**e
        return out

    @property
    def num_divisors(self) -> int:
        return math.prod(e + 1 for _, e in self.factors)

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(self.factors)

    def __len__(self) -> int:
        return len(self.factors)


def _brent_rho(n: int, rng: random.Random) -> int:
    """Return a non-trivial factor of the odd composite n (Brent's cycle finding)."""
    while True:
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g = r = q = 1
        x = ys = y
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


def _split_cofactor(n: int, out: dict[int, int], rng: random.Random) -> None:
    if n == 1:
        return
    if is_prime_u64(n):
        out[n] = out.get(n, 0) + 1
        return
    r = math.isqrt(n)
    if r * r == n:
        _split_cofactor(r, out, rng)
        _split_cofactor(r, out, rng)
        return
    d = _brent_rho(n, rng)
    _split_cofactor(d, out, rng)
    _split_cofactor(n // d, out, rng)


def factorize(n: int) -> Factorization:
    """Factor 1 <= n < 2^64: trial division by primes <= 10^6, then Pollard-Brent rho."""
    check_nat64(n)
    factors: dict[int, int] = {}
    if n < SPF_TABLE_LIMIT:
        spf = _spf_table()
        while n > 1:
            p = spf[n]
            factors[p] = factors.get(p, 0) + 1
            n //= p
        return Factorization(tuple(sorted(factors.items())))
    for p in _trial_primes():
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            factors[p] = e
    if n > 1:
        # Seeded per call: factorization is a pure function of its input.
        _split_cofactor(n, factors, random.Random(n))
    return Factorization(tuple(sorted(factors.items())))


def sigma_of(f: Factorization) -> int:
    """σ from a factorization, as an unbounded int."""
    return math.prod((p ** (e + 1) - 1) // (p - 1) for p, e in f.factors)


def sigma(n: int) -> int:
    """Sum of divisors of n; raises Nat64Overflow if σ(n) >= 2^64."""
    s = sigma_of(factorize(n))
    if s >= U64_LIMIT:
        raise Nat64Overflow(f"sigma({n}) = {s} does not fit in 64 bits")
    return s


def divisors(f: Factorization | int, cap: int = DIVISOR_CAP) -> list[int]:
    """All divisors in increasing order. Accepts a Factorization or the integer itself."""
    if isinstance(f, int):
        f = factorize(f)
    count = f.num_divisors
    if count > cap:
        raise DivisorCapExceeded(f"{count} divisors exceeds cap {cap}")
    if f.value >= U64_LIMIT:
        raise Nat64Overflow(f"{f.value} does not fit in 64 bits")
    divs = [1]
    for p, e in f.factors:
        divs = [d * p**i for d in divs for i in range(e + 1)]
    divs.sort()
    return divs


def integer_sqrt(x: int) -> int:
    """floor(sqrt(x)) for any natural x."""
    if x < 0:
        raise DomainError(f"integer_sqrt of negative {x}")
    return math.isqrt(x)


def is_perfect_square(x: int) -> tuple[bool, int | None]:
    """(True, r) with r*r == x, or (False, None). Negative x is never a square."""
    if x < 0:
        return False, None
    r = math.isqrt(x)
    if r * r == x:
        return True, r
    return False, None

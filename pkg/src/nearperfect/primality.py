"""Miller-Rabin primality: deterministic below 2^64, probabilistic above."""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum

from .errors import DomainError

U64_LIMIT = 1 << 64
DEFAULT_ROUNDS = 40

# Sound for every n < 3.3 * 10^24 (Sorenson & Webster), so in particular for n < 2^64.
_U64_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97)


class Verdict(str, Enum):
    PRIME = "prime"
    COMPOSITE = "composite"
    PROBABLE_PRIME = "probable_prime"


@dataclass(frozen=True)
class PrimalityVerdict:
    value: int
    verdict: Verdict
    rounds: int = 0

    def __bool__(self) -> bool:
        return self.verdict is not Verdict.COMPOSITE


def _strong_probable_prime(n: int, d: int, s: int, base: int) -> bool:
    """One Miller-Rabin round: n - 1 = d * 2^s with d odd."""
    x = pow(base, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def _decompose(n: int) -> tuple[int, int]:
    d = n - 1
    s = (d & -d).bit_length() - 1
    return d >> s, s


def _small_verdict(n: int) -> bool | None:
    """Settle n by small-prime trial division, or return None if undecided."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n == p:
            return True
        if n % p == 0:
            return False
    return None


def is_prime_u64(n: int) -> PrimalityVerdict:
    """Exact primality for 0 <= n < 2^64."""
    if n < 0 or n >= U64_LIMIT:
        raise DomainError(f"is_prime_u64 needs 0 <= n < 2^64, got {n}")
    small = _small_verdict(n)
    if small is None:
        d, s = _decompose(n)
        small = all(_strong_probable_prime(n, d, s, a) for a in _U64_WITNESSES)
    return PrimalityVerdict(n, Verdict.PRIME if small else Verdict.COMPOSITE, 0)


def is_probable_prime(
    n: int,
    rounds: int = DEFAULT_ROUNDS,
    *,
    seed: int | None = None,
    rng: random.Random | None = None,
) -> PrimalityVerdict:
    """Miller-Rabin with `rounds` random bases; error <= 4**-rounds on a prime verdict.

    Values below 2^64 go through the deterministic test. Bases come from
    `rng` if given, else from a fresh ``random.Random(seed)``.
    """
    if rounds < 1:
        raise DomainError("rounds must be >= 1")
    if n < 0:
        raise DomainError(f"negative input {n}")
    if n < U64_LIMIT:
        return is_prime_u64(n)
    if _small_verdict(n) is False:
        return PrimalityVerdict(n, Verdict.COMPOSITE, rounds)
    if rng is None:
        rng = random.Random(seed)
    d, s = _decompose(n)
    for _ in range(rounds):
        if not _strong_probable_prime(n, d, s, rng.randrange(2, n - 1)):
            return PrimalityVerdict(n, Verdict.COMPOSITE, rounds)
    return PrimalityVerdict(n, Verdict.PROBABLE_PRIME, rounds)


def is_prime(n: int, rounds: int = DEFAULT_ROUNDS, seed: int | None = None) -> bool:
    """Boolean shortcut over both paths."""
    return bool(is_probable_prime(n, rounds, seed=seed))

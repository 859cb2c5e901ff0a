"""Segmented σ sieve and ordered, optionally parallel, range scans."""

from __future__ import annotations

import math
import os
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable, Iterable, Iterator, TypeVar

import numpy as np

from .classify import (
    ClassificationReport,
    Kind,
    classify,
    is_pseudoperfect,
    near_perfect_witnesses,
    strongly_pseudoperfect,
)
from .errors import DomainError

DEFAULT_MAX_RANGE = 1 << 40
DEFAULT_BLOCK_SIZE = 1 << 20
MAX_BLOCK_SIZE = 1 << 27
# Below this bound plain divisor accumulation is used; above it, paired accumulation up to sqrt(hi).
SIMPLE_SIEVE_LIMIT = 1 << 16

T = TypeVar("T")


def max_range() -> int:
    raw = os.environ.get("NEARPERFECT_MAX_RANGE")
    if raw is None:
        return DEFAULT_MAX_RANGE
    try:
        value = int(raw)
    except ValueError:
        raise DomainError(f"NEARPERFECT_MAX_RANGE is not an integer: {raw!r}") from None
    if value < 2:
        raise DomainError(f"NEARPERFECT_MAX_RANGE must be >= 2, got {value}")
    # σ(n) < 2^63 must hold for the int64 sieve; 2^56 leaves ample margin.
    return min(value, 1 << 56)


@dataclass(frozen=True)
class RangeSpec:
    lo: int
    hi: int
    block_size: int = DEFAULT_BLOCK_SIZE

    def __post_init__(self) -> None:
        if not 1 <= self.lo < self.hi:
            raise DomainError(f"need 1 <= lo < hi, got [{self.lo}, {self.hi})")
        if self.hi > max_range():
            raise DomainError(f"hi = {self.hi} exceeds the scan ceiling {max_range()}")
        if not 1 <= self.block_size <= MAX_BLOCK_SIZE:
            raise DomainError(f"block_size must be in [1, {MAX_BLOCK_SIZE}], got {self.block_size}")

    def segments(self) -> Iterator[tuple[int, int]]:
        for base in range(self.lo, self.hi, self.block_size):
            yield base, min(base + self.block_size, self.hi)


@dataclass(frozen=True)
class SigmaBlock:
    """values[i] = σ(base + i), as an int64 array."""

    base: int
    values: np.ndarray

    def __len__(self) -> int:
        return len(self.values)

    def items(self) -> Iterator[tuple[int, int]]:
        for i, v in enumerate(self.values.tolist()):
            yield self.base + i, v


def sigma_segment(lo: int, hi: int) -> np.ndarray:
    """σ(n) for lo <= n < hi."""
    out = np.zeros(hi - lo, dtype=np.int64)
    if hi <= SIMPLE_SIEVE_LIMIT:
        for d in range(1, hi):
            start = max(d, -(-lo // d) * d)
            if start < hi:
                out[start - lo :: d] += d
        return out
    # Each divisor pair d <= n/d of n is credited once, from the smaller side.
    for d in range(1, math.isqrt(hi - 1) + 1):
        first = max(d * d, -(-lo // d) * d)
        if first >= hi:
            continue
        cofactors = np.arange(first // d, (hi - 1) // d + 1, dtype=np.int64)
        out[first - lo :: d] += cofactors + d
        if first == d * d:
            out[first - lo] -= d
    return out


def _sigma_block(bounds: tuple[int, int]) -> SigmaBlock:
    lo, hi = bounds
    return SigmaBlock(lo, sigma_segment(lo, hi))


def ordered_map(fn: Callable[[Any], T], items: Iterable[Any],
                jobs: int = 1) -> Iterator[T]:
    """Map over items, yielding results in input order; at most 2*jobs tasks in flight."""
    if jobs <= 1:
        for item in items:
            yield fn(item)
        return
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        pending: deque = deque()
        for item in items:
            pending.append(pool.submit(fn, item))
            if len(pending) >= 2 * jobs:
                yield pending.popleft().result()
        while pending:
            yield pending.popleft().result()


def sieve_sigma_range(spec: RangeSpec, jobs: int = 1) -> Iterator[SigmaBlock]:
    """Stream σ over [spec.lo, spec.hi) in blocks of increasing base."""
    yield from ordered_map(_sigma_block, spec.segments(), jobs)


def strong_hits_segment(lo: int, hi: int, sig: np.ndarray) -> list[tuple[int, int]]:
    """(n, d) with d < n/d, d | n and σ(n) - d - n/d = 2n, for lo <= n < hi, sorted."""
    hits = []
    for d in range(1, math.isqrt(max(hi - 1, 1)) + 1):
        first = max(d * (d + 1), -(-lo // d) * d)
        if first >= hi:
            continue
        n = np.arange(first, hi, d, dtype=np.int64)
        excess = sig[first - lo :: d] - 2 * n
        match = np.nonzero(excess == n // d + d)[0]
        hits.extend((int(n[i]), d) for i in match)
    hits.sort()
    return hits


def _candidates(kind: Kind, lo: int, sig: np.ndarray) -> np.ndarray:
    """Offsets of n that may satisfy `kind`; a superset, exact for σ-only kinds."""
    n = np.arange(lo, lo + len(sig), dtype=np.int64)
    excess = sig - 2 * n
    if kind is Kind.PERFECT:
        mask = excess == 0
    elif kind is Kind.ABUNDANT:
        mask = excess > 0
    elif kind is Kind.DEFICIENT:
        mask = excess < 0
    elif kind is Kind.QUASIPERFECT:
        mask = excess == 1
    elif kind is Kind.NEAR_PERFECT_1:
        safe = np.where(excess > 0, excess, 1)
        mask = (excess > 0) & (n % safe == 0)
    elif kind is Kind.NEAR_PERFECT_2:
        mask = excess >= 3
    elif kind in (Kind.PSEUDOPERFECT, Kind.STRONGLY_PSEUDOPERFECT):
        mask = excess >= 0
    elif kind is Kind.WEIRD:
        safe = np.where(excess > 0, excess, 1)
        mask = (excess > 0) & (n % safe != 0)
    else:
        raise DomainError(f"no candidate filter for {kind}")
    return np.nonzero(mask)[0]


def _exact(kind: Kind, n: int) -> bool:
    if kind is Kind.NEAR_PERFECT_2:
        return bool(near_perfect_witnesses(n, 2))
    if kind is Kind.PSEUDOPERFECT:
        return bool(is_pseudoperfect(n))
    if kind is Kind.WEIRD:
        return not is_pseudoperfect(n)
    if kind is Kind.STRONGLY_PSEUDOPERFECT:
        return bool(strongly_pseudoperfect(n))
    return True


def _scan_segment(task: tuple[tuple[int, int], Kind]) -> list[tuple[int, ClassificationReport]]:
    (lo, hi), kind = task
    sig = sigma_segment(lo, hi)
    if kind is Kind.STRONG_2NP:
        ns = sorted({n for n, _ in strong_hits_segment(lo, hi, sig)})
    else:
        ns = [lo + int(i) for i in _candidates(kind, lo, sig)]
        ns = [n for n in ns if _exact(kind, n)]
    return [(n, classify(n)) for n in ns]


def parse_kind(kind: Kind | str) -> Kind:
    if isinstance(kind, Kind):
        return kind
    aliases = {"strongly-2-near-perfect": Kind.STRONG_2NP, "near-perfect": Kind.NEAR_PERFECT_1}
    try:
        return aliases.get(kind) or Kind(kind)
    except ValueError:
        valid = ", ".join(k.value for k in Kind)
        raise DomainError(f"unknown kind {kind!r}; expected one of: {valid}") from None


class _SegmentTask:
    """Picklable (segment) -> hits callable bound to one kind."""

    def __init__(self, kind: Kind) -> None:
        self.kind = kind

    def __call__(self, bounds: tuple[int, int]) -> list[tuple[int, ClassificationReport]]:
        return _scan_segment((bounds, self.kind))


def scan_classified(spec: RangeSpec, kind: Kind | str,
                    jobs: int = 1) -> Iterator[tuple[int, ClassificationReport]]:
    """Every n in the range satisfying `kind`, increasing, each with its full report.

    Output does not depend on block_size or jobs.
    """
    task = _SegmentTask(parse_kind(kind))
    for hits in ordered_map(task, spec.segments(), jobs):
        yield from hits

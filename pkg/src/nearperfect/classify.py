"""Classification of a single n into the near-perfect taxonomy, with witnesses.

Omitted divisors are any distinct positive divisors of n, including 1 and
n itself. Every positive verdict carries a witness that can be re-checked
against σ(n) directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from .arith import check_nat64, divisors, factorize, sigma_of
from .errors import BudgetExceeded, DomainError, Nat64Overflow
from .primality import U64_LIMIT

DP_BUDGET = 10**7


class Kind(str, Enum):
    PERFECT = "perfect"
    ABUNDANT = "abundant"
    DEFICIENT = "deficient"
    QUASIPERFECT = "quasiperfect"
    NEAR_PERFECT_1 = "1-near-perfect"
    NEAR_PERFECT_2 = "2-near-perfect"
    PSEUDOPERFECT = "pseudoperfect"
    WEIRD = "weird"
    STRONGLY_PSEUDOPERFECT = "strongly-pseudoperfect"
    STRONG_2NP = "strong-2np"


@dataclass(frozen=True)
class NearPerfectWitness:
    n: int
    omitted: tuple[int, ...]

    @property
    def s(self) -> int:
        return len(self.omitted)

    def check(self, sigma_n: int) -> bool:
        return (
            len(set(self.omitted)) == len(self.omitted)
            and all(self.n % d == 0 for d in self.omitted)
            and sum(self.omitted) == sigma_n - 2 * self.n
        )

    def to_dict(self) -> dict:
        return {"kind": "near-perfect", "n": self.n, "s": self.s, "omitted": list(self.omitted)}


@dataclass(frozen=True)
class StrongWitness:
    n: int
    d: int

    @property
    def pair(self) -> tuple[int, int]:
        return self.d, self.n // self.d

    def check(self, sigma_n: int) -> bool:
        d, e = self.pair
        return d * e == self.n and d != e and sigma_n - d - e == 2 * self.n

    def to_dict(self) -> dict:
        return {"kind": "strong", "n": self.n, "d": self.d, "pair": list(self.pair)}


@dataclass(frozen=True)
class SubsetResult:
    """Outcome of a subset search. Truthiness is `holds`, so an empty subset still counts."""

    n: int
    holds: bool
    subset: tuple[int, ...] = ()

    def __bool__(self) -> bool:
        return self.holds


@dataclass(frozen=True)
class ClassificationReport:
    n: int
    sigma: int
    abundance: int
    labels: tuple[str, ...]
    witnesses: tuple[NearPerfectWitness | StrongWitness, ...] = ()
    undetermined: tuple[str, ...] = field(default=())

    def has(self, kind: Kind | str) -> bool:
        return str(getattr(kind, "value", kind)) in self.labels

    def to_dict(self) -> dict:
        out = {
            "n": self.n,
            "sigma": self.sigma,
            "abundance": self.abundance,
            "labels": list(self.labels),
            "witnesses": [w.to_dict() for w in self.witnesses],
        }
        if self.undetermined:
            out["undetermined"] = list(self.undetermined)
        return out


def _sigma_and_divisors(n: int) -> tuple[int, list[int]]:
    check_nat64(n)
    f = factorize(n)
    s = sigma_of(f)
    if s >= U64_LIMIT:
        raise Nat64Overflow(f"sigma({n}) = {s} does not fit in 64 bits")
    return s, divisors(f)


def near_perfect_witnesses(n: int, s: int, *, sigma_n: int | None = None,
                           divs: list[int] | None = None) -> list[NearPerfectWitness]:
    """Every omitted set of size s (1 or 2), pairs as (smaller, larger) in increasing order."""
    if s not in (1, 2):
        raise DomainError(f"witness enumeration supports s in {{1, 2}}, got {s}")
    if sigma_n is None or divs is None:
        sigma_n, divs = _sigma_and_divisors(n)
    target = sigma_n - 2 * n
    if target <= 0:
        return []
    if s == 1:
        return [NearPerfectWitness(n, (target,))] if n % target == 0 else []
    out = []
    for d in divs:
        e = target - d
        if e <= d:
            break
        if n % e == 0:
            out.append(NearPerfectWitness(n, (d, e)))
    return out


def _check_budget(target: int, items: int, budget: int) -> None:
    cells = (target + 1) * max(items, 1)
    if cells > budget:
        raise BudgetExceeded(f"subset-sum table of {cells} cells exceeds budget {budget}")


def _greedy_subset(values: list[int], target: int) -> tuple[int, ...] | None:
    """Largest-first greedy; a cheap witness for most pseudoperfect numbers."""
    picked = []
    rest = target
    for v in sorted(values, reverse=True):
        if v <= rest:
            picked.append(v)
            rest -= v
            if rest == 0:
                break
    return tuple(sorted(picked)) if rest == 0 else None


def _subset_sum(values: list[int], target: int) -> tuple[int, ...] | None:
    """Subset of `values` summing to target, or None; bitset DP with backtracking."""
    mask = (1 << (target + 1)) - 1
    layers = [1]
    for v in values:
        prev = layers[-1]
        layers.append((prev | (prev << v)) & mask)
        if layers[-1] >> target & 1:
            break
    if not layers[-1] >> target & 1:
        return None
    picked = []
    rest = target
    for i in range(len(layers) - 1, 0, -1):
        if not layers[i - 1] >> rest & 1:
            picked.append(values[i - 1])
            rest -= values[i - 1]
    assert rest == 0
    return tuple(sorted(picked))


def is_s_near_perfect(n: int, s: int, *, budget: int = DP_BUDGET) -> bool:
    """True iff exactly s distinct divisors of n sum to σ(n) - 2n.

    Dynamic programming over (count, sum): one bitset of reachable sums per count.
    """
    sigma_n, divs = _sigma_and_divisors(n)
    if s < 1 or s > len(divs):
        raise DomainError(f"s must be in [1, {len(divs)}] for n = {n}, got {s}")
    target = sigma_n - 2 * n
    if target <= 0:
        return False
    usable = [d for d in divs if d <= target]
    if len(usable) < s:
        return False
    _check_budget(target, len(usable), budget)
    mask = (1 << (target + 1)) - 1
    by_count = [1] + [0] * s
    for d in usable:
        for c in range(s, 0, -1):
            by_count[c] |= (by_count[c - 1] << d) & mask
    return bool(by_count[s] >> target & 1)


def is_pseudoperfect(n: int, *, budget: int = DP_BUDGET) -> SubsetResult:
    """Some subset of divisors (possibly empty) sums to σ(n) - 2n; subset is the omitted set."""
    sigma_n, divs = _sigma_and_divisors(n)
    return _pseudoperfect(n, sigma_n, divs, budget)


def _pseudoperfect(n: int, sigma_n: int, divs: list[int], budget: int) -> SubsetResult:
    target = sigma_n - 2 * n
    if target < 0:
        return SubsetResult(n, False)
    if target == 0:
        return SubsetResult(n, True, ())
    usable = [d for d in divs if d <= target]
    found = _greedy_subset(usable, target)
    if found is None:
        _check_budget(target, len(usable), budget)
        found = _subset_sum(usable, target)
    return SubsetResult(n, found is not None, found or ())


def strongly_pseudoperfect(n: int, *, budget: int = DP_BUDGET) -> SubsetResult:
    """A divisor set S closed under d -> n/d with sum 2n. `subset` is S itself.

    The search runs over complementary pairs (d, n/d), choosing which pairs to
    omit so that the omitted total is σ(n) - 2n.
    """
    sigma_n, divs = _sigma_and_divisors(n)
    return _strongly_pseudoperfect(n, sigma_n, divs, budget)


def _strongly_pseudoperfect(n: int, sigma_n: int, divs: list[int], budget: int) -> SubsetResult:
    target = sigma_n - 2 * n
    if target < 0:
        return SubsetResult(n, False)
    root = math.isqrt(n)
    units = [(d, n // d) for d in divs if d < n // d]
    if root * root == n:
        units.append((root,))
    weights = [sum(u) for u in units]
    usable = [i for i, w in enumerate(weights) if w <= target]
    # Solve over unit indices so equal weights stay distinguishable.
    chosen = _greedy_indexed([weights[i] for i in usable], target)
    if chosen is None:
        _check_budget(target, len(usable), budget)
        chosen = _subset_sum_indexed([weights[i] for i in usable], target)
    if chosen is None:
        return SubsetResult(n, False)
    omitted = {d for j in chosen for d in units[usable[j]]}
    return SubsetResult(n, True, tuple(d for d in divs if d not in omitted))


def _greedy_indexed(values: list[int], target: int) -> list[int] | None:
    picked = []
    rest = target
    for i in sorted(range(len(values)), key=lambda j: -values[j]):
        if values[i] <= rest:
            picked.append(i)
            rest -= values[i]
    return picked if rest == 0 else None


def _subset_sum_indexed(values: list[int], target: int) -> list[int] | None:
    mask = (1 << (target + 1)) - 1
    layers = [1]
    for v in values:
        layers.append((layers[-1] | (layers[-1] << v)) & mask)
    if not layers[-1] >> target & 1:
        return None
    picked = []
    rest = target
    for i in range(len(layers) - 1, 0, -1):
        if not layers[i - 1] >> rest & 1:
            picked.append(i - 1)
            rest -= values[i - 1]
    return picked


def strong_2np_witnesses(n: int, *, sigma_n: int | None = None,
                         divs: list[int] | None = None) -> list[StrongWitness]:
    """Divisors d < sqrt(n) with σ(n) - d - n/d = 2n."""
    if sigma_n is None or divs is None:
        sigma_n, divs = _sigma_and_divisors(n)
    target = sigma_n - 2 * n
    out = []
    for d in divs:
        e = n // d
        if d >= e:
            break
        if d + e == target:
            out.append(StrongWitness(n, d))
    return out


def is_quasiperfect(n: int) -> bool:
    sigma_n, _ = _sigma_and_divisors(n)
    return sigma_n == 2 * n + 1


def classify(n: int, *, budget: int = DP_BUDGET) -> ClassificationReport:
    """Every applicable label of n, with witnesses for the near-perfect ones."""
    sigma_n, divs = _sigma_and_divisors(n)
    abundance = sigma_n - 2 * n
    labels: list[str] = []
    witnesses: list[NearPerfectWitness | StrongWitness] = []
    undetermined: list[str] = []

    if abundance == 0:
        labels.append(Kind.PERFECT.value)
    elif abundance > 0:
        labels.append(Kind.ABUNDANT.value)
    else:
        labels.append(Kind.DEFICIENT.value)
    if abundance == 1:
        labels.append(Kind.QUASIPERFECT.value)

    near = []
    for s, kind in ((1, Kind.NEAR_PERFECT_1), (2, Kind.NEAR_PERFECT_2)):
        found = near_perfect_witnesses(n, s, sigma_n=sigma_n, divs=divs)
        if found:
            labels.append(kind.value)
            near.extend(found)
    witnesses.extend(near)

    if abundance >= 0:
        pseudo: SubsetResult | None
        if near:
            pseudo = SubsetResult(n, True, near[0].omitted)
        else:
            try:
                pseudo = _pseudoperfect(n, sigma_n, divs, budget)
            except BudgetExceeded:
                pseudo = None
                undetermined.append(Kind.PSEUDOPERFECT.value)
                if abundance > 0:
                    undetermined.append(Kind.WEIRD.value)
        if pseudo is not None:
            if pseudo:
                labels.append(Kind.PSEUDOPERFECT.value)
                s = len(pseudo.subset)
                if s >= 3:
                    labels.append(f"{s}-near-perfect")
                    witnesses.append(NearPerfectWitness(n, pseudo.subset))
            elif abundance > 0:
                labels.append(Kind.WEIRD.value)

        try:
            if _strongly_pseudoperfect(n, sigma_n, divs, budget):
                labels.append(Kind.STRONGLY_PSEUDOPERFECT.value)
        except BudgetExceeded:
            undetermined.append(Kind.STRONGLY_PSEUDOPERFECT.value)

    strong = strong_2np_witnesses(n, sigma_n=sigma_n, divs=divs)
    if strong:
        labels.append(Kind.STRONG_2NP.value)
        witnesses.extend(strong)

    return ClassificationReport(
        n=n,
        sigma=sigma_n,
        abundance=abundance,
        labels=tuple(labels),
        witnesses=tuple(witnesses),
        undetermined=tuple(undetermined),
    )

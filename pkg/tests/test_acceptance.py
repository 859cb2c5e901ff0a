"""End-to-end acceptance checks, one group per criterion.

Run alone with `pytest tests/test_acceptance.py`; a PASS/FAIL line per criterion
is printed in the terminal summary.
"""

import math
import random
import time

import numpy as np
import pytest

from nearperfect import families as fam
from nearperfect.arith import factorize, sigma, sigma_of
from nearperfect.classify import Kind, NearPerfectWitness, classify, near_perfect_witnesses
from nearperfect.primality import U64_LIMIT, is_prime_u64, is_probable_prime
from nearperfect.sieve import RangeSpec, scan_classified, sieve_sigma_range


def criterion(n):
    return pytest.mark.criterion(n)


@criterion(1)
def test_theorem2_set():
    start = time.perf_counter()
    result = fam.verify_theorem2(20, 10_000)
    elapsed = time.perf_counter() - start
    assert result.mismatches == []
    assert {w.n for w in result.hits} == {18, 36, 200}
    found = {(w.n, w.omitted) for w in result.hits}
    assert {(18, (1, 2)), (36, (1, 18)), (200, (25, 40))} <= found
    assert elapsed < 120


STRONG_ROWS = [
    (156, 392, 2, 78),
    (352, 756, 8, 44),
    (6832, 15376, 4, 1708),
    (60976, 122512, 148, 412),
    (91648, 184140, 128, 716),
    (152812, 306432, 302, 506),
    (260865, 539136, 15, 17391),
]


@criterion(2)
def test_strong_table_single_job():
    start = time.perf_counter()
    result = fam.verify_strong_table(10**6)
    elapsed = time.perf_counter() - start
    assert result.passed
    assert [(h.n, h.sigma, h.d1, h.d2) for h in result.hits] == STRONG_ROWS
    assert elapsed < 300


@criterion(2)
def test_strong_table_eight_jobs():
    start = time.perf_counter()
    result = fam.verify_strong_table(10**6, jobs=8, block_size=1 << 17)
    elapsed = time.perf_counter() - start
    assert [(h.n, h.sigma, h.d1, h.d2) for h in result.hits] == STRONG_ROWS
    assert elapsed < 60


@criterion(2)
def test_strong_scan_agrees_with_table():
    hits = [n for n, _ in scan_classified(RangeSpec(1, 10**6), Kind.STRONG_2NP)]
    assert hits == [row[0] for row in STRONG_ROWS]


@criterion(3)
def test_strong_family_primes():
    start = time.perf_counter()
    rng = random.Random(20261019)
    for a in (3, 7, 19, 27, 31, 39, 151, 199, 451):
        numerator = (1 << (a + 3)) - (1 << a) - 1
        assert numerator % 5 == 0
        p = numerator // 5
        if p < U64_LIMIT:
            assert is_prime_u64(p), a
        else:
            assert is_probable_prime(p, 40, rng=rng), a
        assert fam.strong_prime_candidate(a) == p
    assert fam.strong_prime_candidate(3) == 11
    assert fam.strong_prime_candidate(19) == 734003
    assert time.perf_counter() - start < 10


@criterion(3)
def test_strong_family_records(capsys):
    start = time.perf_counter()
    records = fam.gen_strong_2np(451, seed=1)
    listed = {3, 7, 19, 27, 31, 39, 151, 199, 451}
    found = {r.a for r in records}
    assert listed <= found
    # Extra hits would not contradict the published list, which is not claimed complete.
    extra = sorted(a for a in found - listed if a < 151)
    with capsys.disabled():
        print(f"\nunlisted strong-family a below 151: {extra or 'none'}")
    assert all(r.status in ("verified", "unverified-large") for r in records)
    assert all(r.status == "verified" for r in records if r.n < fam.VERIFY_LIMIT)
    assert time.perf_counter() - start < 10


@criterion(4)
def test_theorem1_completeness():
    start = time.perf_counter()
    result = fam.verify_theorem1(10, 10_000)
    elapsed = time.perf_counter() - start
    assert result.mismatches == []
    assert result.hits
    for rec in result.hits:
        fid, a, b = fam.match_2kp_witness(rec.n, NearPerfectWitness(rec.n, rec.omitted))
        assert fid is rec.family
        assert fam.theorem1_p(fid, rec.k, a, b) == rec.p
    assert elapsed < 300


@criterion(4)
def test_theorem1_families_are_disjoint():
    result = fam.verify_theorem1(10, 10_000)
    for rec in result.hits:
        matches = set()
        for fid in (fam.FamilyId.T1F1, fam.FamilyId.T1F2, fam.FamilyId.T1F3, fam.FamilyId.T1F4):
            for k_a_b in _family_params(fid, rec.k):
                if fam.theorem1_p(fid, *k_a_b) == rec.p and _omitted(fid, rec.k, k_a_b, rec.p) == rec.omitted:
                    matches.add(fid)
        assert matches == {rec.family}, (rec, matches)


def _family_params(fid, k):
    if fid is fam.FamilyId.T1F1:
        return [(k, None, None)]
    if fid is fam.FamilyId.T1F3:
        return [(k, a, b) for a in range(1, k + 1) for b in range(1, k + 1)]
    return [(k, a, b) for a in range(1, k + 1) for b in range(a + 1, k + 1)]


def _omitted(fid, k, params, p):
    _, a, b = params
    if fid is fam.FamilyId.T1F1:
        pair = (1, p)
    elif fid is fam.FamilyId.T1F2:
        pair = (1 << a, 1 << b)
    elif fid is fam.FamilyId.T1F3:
        pair = (1 << a, (1 << b) * p)
    else:
        pair = ((1 << a) * p, (1 << b) * p)
    return tuple(sorted(pair))


@criterion(5)
def test_lemma_audits():
    start = time.perf_counter()
    l4 = fam.audit_lemma4(200)
    assert l4.mismatches == []
    assert [(h["k"], h["a"]) for h in l4.hits] == [(1, 1)]
    l17 = fam.audit_lemma17(64, 64)
    assert l17.mismatches == []
    assert l17.hits and all(h["b"] == 2 for h in l17.hits)
    assert ((1 << 14) + 1) % 29 == 0 and (3 * (1 << 9) + 1) % 29 == 0
    assert all(l17.checks.values()) and len(l17.checks) == 2
    assert time.perf_counter() - start < 10


@criterion(6)
def test_spot_values():
    assert sigma(70) == 144
    assert classify(70).has(Kind.WEIRD)

    r12 = classify(12)
    assert r12.has(Kind.NEAR_PERFECT_1)
    assert [w.omitted for w in near_perfect_witnesses(12, 1)] == [(4,)]

    assert [w.omitted for w in near_perfect_witnesses(40, 1)] == [(10,)]
    pairs = [w.omitted for w in near_perfect_witnesses(40, 2)]
    assert (2, 8) in pairs
    assert fam.classify_2kp_witness(40, NearPerfectWitness(40, (2, 8))) is fam.FamilyId.T1F2

    n = 173369889
    excess = sigma(n) - 2 * n
    assert excess > 0 and n % excess == 0
    assert [w.omitted for w in near_perfect_witnesses(n, 1)] == [(excess,)]
    assert classify(n).has(Kind.NEAR_PERFECT_1)


@criterion(7)
def test_multiplicativity_random_pairs():
    rng = random.Random(7)
    checked = 0
    while checked < 10_000:
        m, n = rng.randint(1, 10**5), rng.randint(1, 10**5)
        if math.gcd(m, n) != 1:
            continue
        assert sigma(m * n) == sigma(m) * sigma(n)
        checked += 1


@criterion(7)
def test_sieve_matches_factorization_to_1e6():
    for block in sieve_sigma_range(RangeSpec(1, 10**6 + 1, 1 << 18)):
        expected = np.fromiter((sigma_of(factorize(n)) for n in range(block.base, block.base + len(block))),
                               dtype=np.int64, count=len(block))
        assert np.array_equal(block.values, expected)


@criterion(7)
def test_scan_determinism_across_jobs():
    spec = RangeSpec(1, 200_000, 1 << 14)
    for kind in (Kind.WEIRD, Kind.NEAR_PERFECT_2, Kind.STRONG_2NP):
        one = [(n, r.to_dict()) for n, r in scan_classified(spec, kind, jobs=1)]
        four = [(n, r.to_dict()) for n, r in scan_classified(spec, kind, jobs=4)]
        assert one == four and one


@criterion(7)
def test_opposite_parity_for_2kp2_hits():
    result = fam.verify_theorem2(20, 10_000)
    assert result.hits
    assert all(sum(w.omitted) % 2 == 1 for w in result.hits)
    assert result.checks["opposite_parity"]


@criterion(7)
def test_family_records_reverify():
    records = []
    for fid in (fam.FamilyId.T1F1, fam.FamilyId.T1F2, fam.FamilyId.T1F3, fam.FamilyId.T1F4):
        records += fam.generate(fid, 40, seed=3)
    records += fam.generate(fam.FamilyId.PS1, 40, seed=3)
    records += fam.generate(fam.FamilyId.PS2, 31, seed=3)
    records += fam.generate(fam.FamilyId.PS3, 31, seed=3)
    records += fam.generate(fam.FamilyId.S2NP, 451, seed=3)
    small = [r for r in records if r.n < 1 << 63]
    assert len(small) > 20
    for r in small:
        assert r.status == "verified", r
        excess = sigma(r.n) - 2 * r.n
        assert excess == sum(r.omitted)
        assert all(r.n % d == 0 for d in r.omitted)
        assert len(set(r.omitted)) == len(r.omitted)


@criterion(8)
def test_no_quasiperfect_to_1e6():
    start = time.perf_counter()
    for block in sieve_sigma_range(RangeSpec(1, 10**6 + 1)):
        n = np.arange(block.base, block.base + len(block), dtype=np.int64)
        assert not np.any(block.values == 2 * n + 1)
    assert [n for n, _ in scan_classified(RangeSpec(1, 10**6 + 1), Kind.QUASIPERFECT)] == []
    assert time.perf_counter() - start < 60

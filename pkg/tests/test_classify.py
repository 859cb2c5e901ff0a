import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nearperfect.arith import divisors, sigma
from nearperfect.classify import (
    ClassificationReport,
    Kind,
    NearPerfectWitness,
    StrongWitness,
    classify,
    is_pseudoperfect,
    is_quasiperfect,
    is_s_near_perfect,
    near_perfect_witnesses,
    strong_2np_witnesses,
    strongly_pseudoperfect,
)
from nearperfect.errors import BudgetExceeded, DomainError
from oracles import (
    brute_omitted_sets,
    brute_pseudoperfect,
    brute_sigma,
    brute_strongly_pseudoperfect,
)


def test_classify_12():
    report = classify(12)
    assert report.has(Kind.NEAR_PERFECT_1)
    assert NearPerfectWitness(12, (4,)) in report.witnesses


def test_classify_70_weird():
    report = classify(70)
    assert report.sigma == 144
    assert report.has(Kind.ABUNDANT) and report.has(Kind.WEIRD)
    assert not report.has(Kind.PSEUDOPERFECT)


def test_classify_6_perfect():
    report = classify(6)
    assert report.has(Kind.PERFECT) and report.abundance == 0
    assert report.has(Kind.PSEUDOPERFECT)


def test_classify_1_deficient():
    report = classify(1)
    assert report.labels == ("deficient",) and report.sigma == 1 and report.abundance == -1


def test_classify_rejects_zero():
    with pytest.raises(DomainError):
        classify(0)


@pytest.mark.parametrize(
    "n, s, pair",
    [(18, 2, (1, 2)), (40, 1, (10,)), (200, 2, (25, 40)), (40, 2, (2, 8)), (36, 2, (1, 18))],
)
def test_near_perfect_witness_examples(n, s, pair):
    assert NearPerfectWitness(n, pair) in near_perfect_witnesses(n, s)


def test_near_perfect_witnesses_exhaustive():
    for n in range(1, 1500):
        for s in (1, 2):
            got = [w.omitted for w in near_perfect_witnesses(n, s)]
            assert got == brute_omitted_sets(n, s), (n, s)


def test_witness_size_restricted():
    with pytest.raises(DomainError):
        near_perfect_witnesses(12, 3)


def test_is_s_near_perfect_examples():
    assert is_s_near_perfect(12, 1)
    assert not any(is_s_near_perfect(70, s) for s in range(1, 9))
    assert not is_s_near_perfect(6, 1)


def test_is_s_near_perfect_bounds():
    with pytest.raises(DomainError):
        is_s_near_perfect(70, 9)
    with pytest.raises(DomainError):
        is_s_near_perfect(70, 0)


def test_is_s_near_perfect_general_s_against_brute_force():
    for n in range(1, 400):
        for s in range(1, min(6, len(divisors(n))) + 1):
            assert is_s_near_perfect(n, s) == bool(brute_omitted_sets(n, s)), (n, s)


def test_dp_witness_consistency_to_1e5():
    for n in range(1, 100_001):
        sigma_n = sigma(n)
        if sigma_n - 2 * n < 3:
            continue
        for s in (1, 2):
            assert bool(near_perfect_witnesses(n, s)) == is_s_near_perfect(n, s, budget=10**10), (n, s)


def test_budget_exceeded_is_an_error():
    # 720 has abundance 978 and 30 divisors, far above a 100-cell table.
    with pytest.raises(BudgetExceeded):
        is_s_near_perfect(720, 3, budget=100)
    with pytest.raises(BudgetExceeded):
        strongly_pseudoperfect(70, budget=1)
    with pytest.raises(BudgetExceeded):
        is_pseudoperfect(70, budget=1)


def test_pseudoperfect_examples():
    assert is_pseudoperfect(12)
    assert not is_pseudoperfect(70)
    six = is_pseudoperfect(6)
    assert six and six.subset == ()


def test_pseudoperfect_witness_is_valid():
    for n in range(1, 3000):
        result = is_pseudoperfect(n)
        assert bool(result) == brute_pseudoperfect(n), n
        if result:
            assert sum(result.subset) == sigma(n) - 2 * n
            assert all(n % d == 0 for d in result.subset)
            assert len(set(result.subset)) == len(result.subset)


def test_strongly_pseudoperfect_examples():
    six = strongly_pseudoperfect(6)
    assert six and six.subset == (1, 2, 3, 6)
    assert strongly_pseudoperfect(156)
    assert not strongly_pseudoperfect(70)


def test_strongly_pseudoperfect_against_brute_force():
    for n in range(1, 700):
        result = strongly_pseudoperfect(n)
        assert bool(result) == brute_strongly_pseudoperfect(n), n
        if result:
            assert sum(result.subset) == 2 * n
            assert {n // d for d in result.subset} == set(result.subset)


@pytest.mark.parametrize(
    "n, expected",
    [(352, [8]), (260865, [15]), (36, [])],
)
def test_strong_2np_examples(n, expected):
    assert [w.d for w in strong_2np_witnesses(n)] == expected


def test_strong_witness_pairs():
    assert StrongWitness(352, 8).pair == (8, 44)
    assert StrongWitness(260865, 15).pair == (15, 17391)


def test_quasiperfect_examples():
    assert not is_quasiperfect(6)
    assert not is_quasiperfect(3)


def test_odd_near_perfect():
    n = 173369889
    report = classify(n)
    assert report.has(Kind.NEAR_PERFECT_1)
    (w,) = [w for w in report.witnesses if isinstance(w, NearPerfectWitness) and w.s == 1]
    assert w.omitted[0] == report.sigma - 2 * n and n % w.omitted[0] == 0


@given(st.integers(min_value=1, max_value=10**7))
@settings(max_examples=300, deadline=None)
def test_report_invariants(n):
    report = classify(n)
    assert isinstance(report, ClassificationReport)
    assert report.abundance == report.sigma - 2 * n
    assert report.has(Kind.ABUNDANT) == (report.abundance > 0)
    assert report.has(Kind.PERFECT) == (report.abundance == 0)
    assert report.has(Kind.QUASIPERFECT) == (report.abundance == 1)
    if report.has(Kind.WEIRD):
        assert report.has(Kind.ABUNDANT) and not report.has(Kind.PSEUDOPERFECT)
    for w in report.witnesses:
        assert w.check(report.sigma)
        if isinstance(w, StrongWitness):
            d, e = w.pair
            assert d * e == n
            assert NearPerfectWitness(n, (d, e)) in near_perfect_witnesses(n, 2)


def test_weird_coherence_to_1e5():
    from oracles import brute_divisors

    weird = []
    for n in range(1, 100_001):
        report = classify(n)
        assert "weird" not in report.undetermined and "pseudoperfect" not in report.undetermined
        if report.abundance > 0:
            assert report.has(Kind.WEIRD) != report.has(Kind.PSEUDOPERFECT)
        if report.has(Kind.WEIRD):
            weird.append(n)
            # Independent subset-sum over trial-division divisors.
            divs = brute_divisors(n)
            target = sum(divs) - 2 * n
            reach = 1
            for d in divs:
                reach |= reach << d
            assert target > 0 and not (reach >> target) & 1
    assert weird[:8] == [70, 836, 4030, 5830, 7192, 7912, 9272, 10430]


def test_weird_agrees_with_brute_force_small():
    for n in range(1, 2000):
        expected = brute_sigma(n) > 2 * n and not brute_pseudoperfect(n)
        assert classify(n).has(Kind.WEIRD) == expected, n


def test_undetermined_instead_of_false_weird():
    report = classify(70, budget=3)
    assert not report.has(Kind.WEIRD)
    assert "weird" in report.undetermined and "pseudoperfect" in report.undetermined

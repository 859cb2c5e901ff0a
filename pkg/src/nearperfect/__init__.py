"""Divisor sums, near-perfect classification and verification campaigns."""

from .arith import Factorization, divisors, factorize, integer_sqrt, is_perfect_square, sigma
from .classify import (
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
from .errors import (
    BudgetExceeded,
    DivisorCapExceeded,
    DomainError,
    Nat64Overflow,
    NearPerfectError,
    NoFamilyError,
)
from .families import (
    CampaignResult,
    FamilyId,
    FamilyRecord,
    audit_lemma4,
    audit_lemma17,
    classify_2kp_witness,
    gen_ps_family,
    gen_strong_2np,
    gen_theorem1_family,
    verify_strong_table,
    verify_theorem1,
    verify_theorem2,
)
from .primality import PrimalityVerdict, Verdict, is_prime_u64, is_probable_prime
from .sieve import RangeSpec, SigmaBlock, scan_classified, sieve_sigma_range

__version__ = "0.1.0"

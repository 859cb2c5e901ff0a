"""Exception hierarchy shared by every module."""


class NearPerfectError(Exception):
    """Base class for library errors."""


class DomainError(NearPerfectError, ValueError):
    """Input outside the domain of an operation (n = 0, negative, bad range...)."""


class Nat64Overflow(NearPerfectError, OverflowError):
    """A value that must fit in 64 bits does not."""


class DivisorCapExceeded(NearPerfectError):
    """Divisor enumeration would exceed the configured cap."""


class BudgetExceeded(NearPerfectError):
    """Subset-sum table would exceed the configured cell budget.

    Raised instead of returning a verdict so that a number is never
    reported as weird merely because the search was cut short.
    """


class NoFamilyError(NearPerfectError):
    """A 2-near-perfect witness of 2^k * p matched none of the four families."""

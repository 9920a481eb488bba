"""Exception hierarchy shared by every module."""


class Hecke3Error(Exception):
    """Base class for all errors raised by :mod:`hecke3`."""


class NonUnimodular(Hecke3Error, ValueError):
    """A triple (or column) shares a common factor with the level."""


class ReductionStall(Hecke3Error, RuntimeError):
    """No admissible reducing vector was found for a modular symbol."""


class BudgetExceeded(Hecke3Error, RuntimeError):
    """Coset enumeration grew beyond the configured bound."""


class ProbeRankDeficient(Hecke3Error, RuntimeError):
    """The chosen probe points do not determine basis coordinates."""


class AnchorNotFound(Hecke3Error, LookupError):
    """No 1-dimensional eigenspace for the anchor eigenvalue exists."""


class InsufficientPrecision(Hecke3Error, ArithmeticError):
    """A 2-adic quantity is not known to enough digits to decide."""


class NilpotentRisk(Hecke3Error, ValueError):
    """The coset alpha + P^-4 meets the nilpotent cone."""


class NotMember(Hecke3Error, ValueError):
    """A matrix does not lie in the requested subgroup."""


class InconsistentInputs(Hecke3Error, ValueError):
    """Eigenvalue inputs violate a derived scalar identity."""


class CacheCorrupt(Hecke3Error, IOError):
    """A cached artifact failed its content-hash check."""

"""Exception types shared across the package."""

from __future__ import annotations


class CoxflatError(Exception):
    """Base class for domain errors (CLI exit status 1)."""


class MatrixValidationError(CoxflatError, ValueError):
    """A Coxeter matrix document is malformed."""


class ContractViolation(CoxflatError, ValueError):
    """An operation was called outside its precondition."""


class PreconditionError(CoxflatError, ValueError):
    """A checked hypothesis of a construction fails; carries a witness."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class ResourceCapError(CoxflatError):
    """An enumeration exceeded its configured cap (CLI exit status 3)."""

    def __init__(self, message: str, attained=None):
        super().__init__(message)
        self.attained = attained


class NotFoundError(CoxflatError):
    """A bounded search finished without a result."""


class UncertifiedError(CoxflatError):
    """A result needed a certified computation but only an uncertified one exists."""


class VerificationError(CoxflatError):
    """A computed certificate failed its own check; carries the counterexample."""

    def __init__(self, message: str, counterexample=None):
        super().__init__(message)
        self.counterexample = counterexample


class AddressValidationError(CoxflatError, ValueError):
    """A chamber address does not fit its building model."""

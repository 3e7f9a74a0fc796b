"""Exception hierarchy shared by every module."""


class RelcalcError(Exception):
    """Base class for all errors raised by relcalc."""


class AmbientMismatchError(RelcalcError, ValueError):
    """Operands live in spaces of different dimension."""


class DomainError(RelcalcError, ValueError):
    """A vector was expected to lie in the domain of a relation but does not."""


class PreconditionError(RelcalcError, ValueError):
    """An operation was called on inputs violating its stated hypotheses."""


class NumericalError(RelcalcError, ArithmeticError):
    """A numerical invariant broke down (non-finite data, failed cross-check)."""


class InstanceFormatError(RelcalcError, ValueError):
    """An instance document does not follow the JSON schema."""

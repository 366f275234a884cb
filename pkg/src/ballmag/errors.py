"""Exception hierarchy shared by every module of the package.

Errors split into two families.  ``InvariantViolation`` subclasses mean a
mathematical identity that must hold did not (a bug, never user error);
``PreconditionError`` subclasses mean the caller asked for something outside
the supported domain.  The CLI maps the two families to distinct exit codes.
"""

from __future__ import annotations


class BallMagError(Exception):
    """Base class for all package errors."""


class InvariantViolation(BallMagError):
    pass


class PreconditionError(BallMagError, ValueError):
    pass


class NotDivisible(InvariantViolation, ArithmeticError):
    """An exact polynomial division left a nonzero remainder."""


class SingularSystem(InvariantViolation):
    """A determinant that should be nonzero vanished identically."""


class NoConvergence(InvariantViolation):
    """An iterative root finder hit its iteration cap."""


class PrecisionNotReached(InvariantViolation):
    """Quadrature node doubling disagreed beyond the requested tolerance."""


class IllConditioned(InvariantViolation):
    """A dense kernel solve left a residual above tolerance."""


class NonSquare(PreconditionError):
    pass


class TooLarge(PreconditionError):
    pass


class TooManyTerms(PreconditionError):
    pass


class InsufficientDepth(PreconditionError):
    pass


class ArgumentTooLarge(PreconditionError):
    pass


class NonPositiveArgument(PreconditionError):
    pass


class NonPositiveCoefficient(PreconditionError):
    pass

"""Exception hierarchy.

Every error raised deliberately by the package derives from
:class:`TrisecantError`; the CLI maps :class:`ValidationError` subclasses to
exit code 2 and :class:`NumericalError` subclasses to exit code 3.
"""


class TrisecantError(Exception):
    pass


class ValidationError(TrisecantError, ValueError):
    """Input violates a documented precondition."""


class NumericalError(TrisecantError, ArithmeticError):
    """A numerical procedure could not deliver its guarantee."""


# theta / elliptic
class NotSiegel(ValidationError):
    pass


class GenusTooLarge(ValidationError):
    pass


class LatticePoint(ValidationError):
    pass


class DegeneratePoint(NumericalError):
    pass


class TruncationOverflow(NumericalError):
    pass


class NoConvergence(NumericalError):
    pass


class JetTooShallow(ValidationError):
    pass


# formal operator rings
class DepthExhausted(ValidationError):
    pass


class WindowExhausted(ValidationError):
    pass


class DegreeBudgetExceeded(NumericalError):
    pass


class NotCommuting(ValidationError):
    pass


class NonConstantRatio(NumericalError):
    pass


# secant checkers
class NearDivisor(NumericalError):
    pass


class DegenerateDirection(NumericalError):
    pass


class ZeroCollision(NumericalError):
    pass


class LostRoot(NumericalError):
    pass


class IntegratorFailure(NumericalError):
    pass


class ResidueMismatch(NumericalError):
    pass


class PostconditionFailed(NumericalError):
    """An identity that the construction guarantees did not hold."""

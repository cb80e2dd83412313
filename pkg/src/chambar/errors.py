"""Exception hierarchy shared by every module.

Input errors (bad arguments, malformed data) derive from ``InputError`` so the
command line can map them to exit status 2 in one place.
"""


class ChambarError(Exception):
    """Base class for all package errors."""


class InputError(ChambarError, ValueError):
    """The caller handed over data that the operation cannot accept."""


class DivisionByZero(InputError, ZeroDivisionError):
    pass


class ModeMismatch(InputError):
    """Exact and approximate scalars (or incompatible fields) were mixed."""


class BasepointMismatch(InputError):
    pass


class SingularBasepoint(InputError):
    pass


class NotAUnit(InputError):
    """A jet with zero constant term cannot be inverted."""


class NotRepresentable(InputError):
    """A value (typically a root) does not live in the chosen coefficient field."""


class NonExactInput(InputError):
    pass


class RankDeficient(InputError):
    pass


class NotColinear(InputError):
    pass


class SumNotZero(InputError):
    pass


class WrongArity(InputError):
    pass


class NotResolvable(InputError):
    """A meromorphic quotient has no unit denominator at the basepoint."""


class DegreeMismatch(InputError):
    pass


class ConstraintViolated(InputError):
    pass


class NotLocallyInvertible(InputError):
    pass


class ZeroField(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class NonHomogeneous(InputError):
    pass


class WrongDegree(InputError):
    pass


class IdentityViolated(ChambarError):
    """An identity that must hold by construction failed; the residual is attached."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class InvarianceViolation(ChambarError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class DiscriminantApproach(ChambarError):
    """Numerical integration came too close to the locus where two values collide."""

    def __init__(self, message, x=None, delta=None):
        super().__init__(message)
        self.x = x
        self.delta = delta


class StepUnderflow(ChambarError):
    def __init__(self, message, x=None):
        super().__init__(message)
        self.x = x


class DenominatorZero(InputError):
    pass

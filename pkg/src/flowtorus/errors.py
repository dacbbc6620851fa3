"""Exception hierarchy.

Every error carries one of three exit categories used by the command line:
validation (1), computation (2) and cap exceeded (3).
"""


class FlowTorusError(Exception):
    exit_code = 2


class ValidationError(FlowTorusError):
    exit_code = 1


class ComputationError(FlowTorusError):
    exit_code = 2


class CapExceeded(FlowTorusError):
    exit_code = 3


# input validation
class ParseError(ValidationError):
    pass


class NotACycle(ValidationError):
    pass


class BadExceptionalReference(ValidationError):
    pass


class InconsistentExceptionalData(ValidationError):
    pass


class UnknownFace(ValidationError):
    pass


class ChainNotNested(ValidationError):
    pass


class NotIrreducible(ValidationError):
    pass


class AmbiguousT(ValidationError):
    pass


class NonIntegerCoefficients(ValidationError):
    pass


class BadPrime(ValidationError):
    pass


class NotApplicable(ValidationError):
    pass


# computation
class ConstantTermNotOne(ComputationError):
    pass


class NonzeroConstantTerm(ComputationError):
    pass


class ZeroPolynomial(ComputationError):
    pass


class ZeroDegree(ComputationError):
    pass


class EmptyRecurrentCore(ComputationError):
    pass


class DegenerateSpecialization(ComputationError):
    pass


class InexactDivision(ComputationError):
    pass


class InconsistentProjection(ComputationError):
    pass


class ActionDoesNotPreserveHull(ComputationError):
    pass


# caps
class SizeCapExceeded(CapExceeded):
    pass


class CycleCapExceeded(CapExceeded):
    pass


class DimensionCapExceeded(CapExceeded):
    pass


class WalkCapExceeded(CapExceeded):
    pass


# warnings
class NotSurjectiveOntoBaseHull(UserWarning):
    pass


class DisconnectedCoverWarning(UserWarning):
    pass


class TruncatedResultWarning(UserWarning):
    pass

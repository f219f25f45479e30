"""Exception hierarchy.

Every error raised by the library derives from :class:`WGMError`.  The three
intermediate classes carry the CLI exit code that a failure of that kind maps
to.
"""


class WGMError(Exception):
    exit_code = 1


class ConfigError(WGMError, ValueError):
    exit_code = 2


class ConvergenceError(WGMError, RuntimeError):
    exit_code = 3


class PreconditionError(WGMError, ValueError):
    exit_code = 4


# special functions
class OrderOutOfRange(PreconditionError):
    pass


class ArgumentAtOrigin(PreconditionError):
    pass


class NonFiniteInput(PreconditionError):
    pass


class RangeExceeded(PreconditionError):
    pass


class IndexOutOfRange(PreconditionError):
    pass


class EvenOrder(PreconditionError):
    pass


# series
class BetaMismatch(PreconditionError):
    pass


class OrderMismatch(PreconditionError):
    pass


class BranchViolation(PreconditionError):
    pass


class CaseBetaMismatch(PreconditionError):
    pass


class TermsExceedOrder(PreconditionError):
    pass


# cavity
class InvalidParameters(PreconditionError):
    pass


class NonPositiveRadius(PreconditionError):
    pass


class DegenerateWell(PreconditionError):
    pass


class NoInteriorMinimum(PreconditionError):
    pass


class IndexNotAboveUnity(PreconditionError):
    pass


# asymptotics
class InsufficientDerivatives(PreconditionError):
    pass


class NonPositiveCurvature(PreconditionError):
    pass


class NonPositiveHessian(PreconditionError):
    pass


class OrderTooHigh(PreconditionError):
    pass


class UnsupportedCase(PreconditionError):
    pass


class MixedCases(PreconditionError):
    pass


# modal
class BoundaryRootSuspected(ConvergenceError):
    pass


class QuadratureNotConverged(ConvergenceError):
    pass


class MaxSubdivisionExceeded(ConvergenceError):
    pass


class MatchingDenominatorTiny(PreconditionError):
    pass


class GridTooCoarse(PreconditionError):
    pass


# fdpml
class GridMisaligned(PreconditionError):
    pass


class UnsupportedM(PreconditionError):
    pass


class FactorizationSingular(ConvergenceError):
    pass


class NoConvergence(ConvergenceError):
    pass


class NonMonotoneConvergence(ConvergenceError):
    pass


# cli
class InsufficientOracleData(PreconditionError):
    pass

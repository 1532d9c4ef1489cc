"""Exception hierarchy.

Validation errors (bad shapes, nonpositive gaps, malformed files) derive from
``ValidationError``; failures discovered during a computation (rank loss,
root bracketing) derive from ``NumericalError``. The CLI maps the former to
exit code 2 and the latter to exit code 3.
"""


class RitzCertifyError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(RitzCertifyError, ValueError):
    """Inputs violate a documented precondition."""


class NumericalError(RitzCertifyError, ArithmeticError):
    """A computation could not be completed reliably."""


class DimensionMismatch(ValidationError):
    pass


class DimensionTooLarge(ValidationError):
    pass


class IndexOutOfRange(ValidationError, IndexError):
    pass


class OperatorOnly(ValidationError):
    """A dense representation was needed but only a matvec is available."""


class ComplementMissing(ValidationError):
    """The orthogonal complement of the trial subspace was not materialized."""


class NonpositiveGap(ValidationError):
    pass


class NonpositivePairDistance(ValidationError):
    pass


class TooFewRitzPairs(ValidationError):
    pass


class ParseError(ValidationError):
    pass


class QuadratureTooCoarse(ValidationError):
    pass


class RankDeficient(NumericalError):
    """Columns are numerically rank deficient.

    The detected numerical rank is available as ``rank``.
    """

    def __init__(self, msg, rank):
        super().__init__(msg)
        self.rank = rank


class RootBracketFailure(NumericalError):
    def __init__(self, msg, branch):
        super().__init__(msg)
        self.branch = branch

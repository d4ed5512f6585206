"""Exception hierarchy shared across the package.

Two families matter to callers: domain errors (bad inputs, exit code 2
in the CLI) and precision errors (a computation could not be certified
at the requested digit budget, exit code 3).
"""


class ArtifactError(Exception):
    """Base class for all package-specific errors."""


class DomainError(ArtifactError, ValueError):
    """Invalid input: out-of-range base, malformed distribution, etc."""


class BudgetError(ArtifactError, ArithmeticError):
    """A precision budget is too small for the requested computation."""


class PrecisionError(ArtifactError, ArithmeticError):
    """A result could not be certified at the working precision."""


class AmbiguityError(PrecisionError):
    """An orbit point sits within the safety margin of a cylinder
    boundary, so its digit triple cannot be certified.  Callers must
    resolve the point exactly or raise precision; guessing is forbidden.
    """

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class InsufficientDataError(DomainError):
    """Fewer usable samples than a fit requires."""


class UndefinedRatioError(DomainError):
    """A ratio diagnostic was requested at zero displacement."""


class ResumeError(ArtifactError):
    """A survey output file is corrupt; resuming requires --force."""

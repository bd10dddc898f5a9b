"""Exception types shared across the package."""


class PhasestabError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(PhasestabError, ValueError):
    """Malformed input: bad dimensions, non-finite entries, unparsable files."""


class DimensionMismatchError(ValidationError):
    """Vector/matrix dimensions do not agree."""


class BudgetExceededError(PhasestabError):
    """An exact combinatorial computation would exceed its enumeration budget."""


class NotAFrameError(PhasestabError):
    """The column set does not span the ambient space where a frame is required."""


class VerdictConflictError(PhasestabError):
    """Two supposedly equivalent injectivity criteria disagree beyond tolerance."""


class SingularFisherError(PhasestabError):
    """The Fisher information matrix is singular at the requested point."""


class ConvergenceError(PhasestabError):
    """An iterative kernel failed to converge; carries the residual in args."""

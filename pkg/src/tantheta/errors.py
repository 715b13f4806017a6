"""Exception hierarchy.

Hypothesis failures of the certificates are *not* errors; they come back as
invalid certificates carrying a :class:`~tantheta.certify.FailureReason`.
Everything here signals malformed input or a numerical breakdown.
"""


class TanThetaError(Exception):
    """Base class; ``code`` is a stable machine-readable tag."""

    code = "ERROR"


class NotSquareError(TanThetaError):
    code = "NOT_SQUARE"


class NotHermitianError(TanThetaError):
    code = "NOT_HERMITIAN"


class RankDeficientError(TanThetaError):
    code = "RANK_DEFICIENT"


class DimensionMismatchError(TanThetaError):
    code = "DIMENSION_MISMATCH"


class RankMismatchError(TanThetaError):
    code = "RANK_MISMATCH"


class ConvergenceError(TanThetaError):
    """Raised when the Jacobi sweep cap is hit. Indicates a bug, not bad input."""

    code = "NO_CONVERGENCE"


class NonpositiveGapError(TanThetaError):
    code = "NONPOSITIVE_GAP"


class GapNonpositiveError(TanThetaError):
    """An eigenvalue of the compression falls inside the interior window."""

    code = "GAP_NONPOSITIVE"


class EmptySelectionError(TanThetaError):
    code = "EMPTY_SELECTION"


class ParseError(TanThetaError):
    code = "PARSE_ERROR"


class SizeOverflowError(TanThetaError):
    code = "SIZE_OVERFLOW"


class ReportIOError(TanThetaError):
    code = "IO_ERROR"

"""Exception types shared across the package."""


class IrsDofError(Exception):
    """Base class for all errors raised by this package."""


class SingularMatrixError(IrsDofError):
    """Square system is singular or too ill-conditioned to solve reliably."""


class RankDeficientError(IrsDofError):
    """Wide system does not have full row rank, so min-norm solves are undefined."""


class NonConvergentError(IrsDofError):
    """Iterative feasibility refinement failed its own sanity checks."""


class TooManyTargetsError(IrsDofError):
    """More cancellation targets than surface elements; exact solve impossible."""


class TooFewElementsError(IrsDofError):
    """Fewer surface elements than the square-subsystem search requires."""


class SizeOverflowError(IrsDofError):
    """Requested alignment construction exceeds the desk-scale budget."""


class NotDecodableError(IrsDofError):
    """Certification found overlapping message/interference subspaces."""


class ZeroSamplesError(IrsDofError):
    """Monte Carlo estimate requested with no samples."""


class WeightSumError(IrsDofError):
    """Time-sharing weights do not form a convex combination."""


class ConfigError(IrsDofError):
    """Invalid run configuration (unknown key, bad value, bad grid)."""

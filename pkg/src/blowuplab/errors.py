"""Exception types shared across the package."""


class BlowupLabError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(BlowupLabError):
    """Invalid or unparseable run configuration.

    Carries a list of human-readable problems in ``errors``.
    """

    def __init__(self, errors):
        if isinstance(errors, str):
            errors = [errors]
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


class InvalidExponent(BlowupLabError):
    """Nonlinearity exponent p outside the admissible range (p must be > 1)."""


class InvalidWeight(BlowupLabError):
    """Weight exponent alpha at or below its lower bound max(beta*(beta+1)/2, 2)."""


class InvalidGrid(BlowupLabError):
    """Grid parameters that cannot produce a usable discretization."""


class DomainError(BlowupLabError):
    """Function evaluated outside its domain of definition."""


class ProfileError(BlowupLabError):
    """Initial-data profile could not be sampled on the grid."""


class NumericalFailure(BlowupLabError):
    """Non-finite values produced where an exception (not a halt) is required."""


class IncompatibleGrids(BlowupLabError):
    """Two trajectories cannot be compared on a common grid."""


class FrameOutOfRange(BlowupLabError):
    """Similarity frame maps outside the stored history or the physical grid."""


class HistoryTooShort(BlowupLabError):
    """Operation needs more stored snapshots than the history provides."""


class InsufficientGrowth(BlowupLabError):
    """Too few samples in the growth window to fit a blow-up rate."""


class RegimeError(BlowupLabError):
    """Diagnostic requested outside its parameter regime."""

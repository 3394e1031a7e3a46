"""Exception types shared across the package."""


class DivergentStatisticError(ValueError):
    """Raised when a stress parameter hits a pole of the statistic family."""


class InsufficientDataError(ValueError):
    """Raised when a routine needs more data points than were supplied."""


class DegenerateDataError(ValueError):
    """Raised when the data carry no usable variation (e.g. all values equal)."""


class InfiniteMeanError(ValueError):
    """Raised when a finite-mean quantity is requested for shape >= 1."""


class BelowTailError(ValueError):
    """Requested quantile lies below the reach of the tail model.

    Carries the empirical quantile of the original sample (when known) as a
    courtesy value in ``empirical_quantile``.
    """

    def __init__(self, message, empirical_quantile=None):
        super().__init__(message)
        self.empirical_quantile = empirical_quantile

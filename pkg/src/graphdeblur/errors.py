"""Exception types raised by graphdeblur."""


class GraphDeblurError(Exception):
    """Base class for every error raised by this package."""


class ConfigurationError(GraphDeblurError, ValueError):
    """Inputs have incompatible shapes or invalid parameter values."""


class NumericIntegrityError(GraphDeblurError, ArithmeticError):
    """A computation produced values that violate a numerical contract."""


class SingularityError(NumericIntegrityError):
    """A spectral filter denominator vanished."""


class DegenerateGCVError(NumericIntegrityError):
    """The GCV denominator is numerically zero."""


class DegenerateGraphError(NumericIntegrityError):
    """The adjacency matrix has zero Frobenius norm."""


class DivergenceError(NumericIntegrityError):
    """An iterative solver produced non-finite or exploding iterates."""

    def __init__(self, message, iteration=None):
        super().__init__(message)
        self.iteration = iteration


class UndefinedMetricError(GraphDeblurError, ValueError):
    """A quality metric is undefined for the given reference image."""

"""Exception hierarchy.

Errors fall into three families so callers (and the command line front end)
can react by category: bad configuration, bad data, or numerical failure.
"""


class BridgeClusterError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(BridgeClusterError, ValueError):
    pass


class DataError(BridgeClusterError, ValueError):
    pass


class NumericalError(BridgeClusterError, ArithmeticError):
    pass


class InvalidM(ConfigError):
    """Region / cluster count outside its admissible range (also used for M <= 1)."""


class KFeasibility(ConfigError):
    """More clusters requested than there are regions."""


class InvalidRatio(ConfigError):
    pass


class DimensionError(DataError):
    pass


class EmptyInput(DataError):
    pass


class LengthMismatch(DataError):
    pass


class ParseError(DataError):
    def __init__(self, message, line=None, column=None):
        super().__init__(message)
        self.line = line
        self.column = column


class RaggedRows(ParseError):
    pass


class NonNumericCell(ParseError):
    pass


class NonConvergence(NumericalError):
    pass


class CoincidentCentroids(NumericalError):
    """Two centroids share a location, so the segment between them is degenerate."""


class IsolatedRegion(NumericalError):
    """A region has zero total affinity to the rest of the graph."""

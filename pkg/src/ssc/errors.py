"""Exception hierarchy shared by all modules."""


class SSCError(Exception):
    """Base class for every error raised by this package."""


class ConfigurationError(SSCError, ValueError):
    """Inputs are individually valid but cannot be combined as requested."""


class EmptySupportError(ConfigurationError):
    """A weight specification puts no mass on any timestep."""


class PartitionSizeError(ConfigurationError):
    """Exhaustive enumeration was requested for too many states."""


class DegenerateBaselineError(SSCError, ArithmeticError):
    """The identity compression has zero objective, so ratios are undefined."""


class NumericalError(SSCError, ArithmeticError):
    """A quantity that must be finite came out as NaN or infinity."""

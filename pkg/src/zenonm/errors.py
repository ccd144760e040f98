"""Exception hierarchy shared by the numerical modules and the CLI."""


class ZenoNMError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(ZenoNMError):
    """Invalid or missing run configuration (CLI exit code 2)."""


class NumericalError(ZenoNMError):
    """A computation could not deliver a trustworthy number (CLI exit code 3)."""


class NonHermitianInput(ZenoNMError, ValueError):
    pass


class NoConvergence(NumericalError):
    pass


class DimensionMismatch(ZenoNMError, ValueError):
    pass


class BadFactorization(ZenoNMError, ValueError):
    pass


class InvalidState(ZenoNMError, ValueError):
    """A matrix or vector violates the density-matrix / pure-state invariants."""


class ToleranceNotMet(NumericalError):
    pass


class NonPhysical(NumericalError):
    pass


class DegenerateDenominator(NumericalError):
    pass


class InvalidGrid(ZenoNMError, ValueError):
    pass

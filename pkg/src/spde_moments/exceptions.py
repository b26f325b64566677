"""Exception types shared across the solver stack."""


class SpdeMomentsError(Exception):
    """Base class for errors raised by this package."""


class TruncationTooLargeError(SpdeMomentsError):
    """Requested chaos truncation enumerates more indices than supported."""


class GridTooLargeError(SpdeMomentsError):
    """Requested sparse grid exceeds the supported level/dimension range."""


class QuadratureError(SpdeMomentsError):
    """Construction of a quadrature rule failed."""


class TimeStepError(SpdeMomentsError):
    """The time step does not tile the integration interval."""


class SolverError(SpdeMomentsError):
    """A linear solve inside a time integration failed."""


class MeasureError(SpdeMomentsError):
    """An error measure is undefined for the given inputs."""


class ConfigError(SpdeMomentsError):
    """An experiment configuration is invalid."""

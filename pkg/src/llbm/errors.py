"""Exception hierarchy shared by the engine and the command line."""


class LLBMError(Exception):
    """Base class for every error raised by this package."""


class InputError(LLBMError, ValueError):
    """Malformed input: dimension mismatch, bad literal, unresolved name."""


class DegenerateBodyError(InputError):
    """A body that must be full-dimensional is not."""


class UnsupportedInstanceError(LLBMError):
    """The request is valid mathematics but outside what is implemented,
    e.g. a Minkowski difference by a segment that is not a summand."""


class OracleUnreliableError(LLBMError):
    """The interpolation oracle could not produce a trustworthy value."""


class BodyInvalidError(InputError):
    """A smooth body failed its convexity certificate."""

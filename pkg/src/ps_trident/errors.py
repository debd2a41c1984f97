"""Structured error types shared across the package."""


class TridentError(Exception):
    """Base class for all structured errors raised by ps-trident."""


class AmbiguousFloor(TridentError):
    """A floor or fractional part could not be certified: an integer lies
    inside the guard band even after precision escalation."""


class PrecisionExhausted(TridentError):
    """Continued-fraction partial quotients can no longer be certified at
    the working precision.  Carries the certified prefix in ``convergents``."""

    def __init__(self, message, convergents=()):
        super().__init__(message)
        self.convergents = list(convergents)


class RationalTerminated(TridentError):
    """The continued fraction of a rational input ended before the requested
    number of terms.  Carries the full finite expansion in ``convergents``."""

    def __init__(self, message, convergents=()):
        super().__init__(message)
        self.convergents = list(convergents)


class ZeroArgument(TridentError):
    """An argument that must be nonzero was zero (e.g. tau_k(0))."""


class RangeEmpty(TridentError):
    """No integer satisfies the requested power range."""


class SizeLimit(TridentError):
    """Input exceeds the documented size cap of an operation."""


class Overflow(TridentError):
    """A spectrum key would exceed the supported integer width."""


class BudgetExceeded(TridentError):
    """The oscillation-resolving grid cannot be met within the node budget."""


class ConfigError(TridentError):
    """Malformed or invalid configuration input."""


class InadmissibleLambda0(UserWarning):
    """The main-term admissibility condition on lambda0 fails; computation
    proceeds but the lower-bound guarantee does not apply."""

"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Malformed or schema-violating configuration text."""


class AccuracyError(RuntimeError):
    """A numerical routine failed to reach its accuracy target.

    Carries the best available estimate so callers can decide whether a
    degraded answer is still usable.
    """

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error

class ConfigError(ValueError):
    """Invalid or inconsistent model configuration."""

    def __init__(self, message, errors=None):
        super().__init__(message)
        self.errors = list(errors) if errors else [message]


class NumericalError(RuntimeError):
    """A solver produced non-finite or non-physical values."""

"""Exception types shared across the package."""


class CircuitError(ValueError):
    """A circuit description is malformed or violates its family's rules."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ResourceLimitError(RuntimeError):
    """A computation would exceed a configured width, path or sample budget."""


class ZeroProbabilityError(ValueError):
    """Postselection onto an outcome whose probability is (numerically) zero."""

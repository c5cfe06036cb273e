"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Raised when an argument or file violates a documented contract."""


class UndefinedFitnessError(ValueError):
    """Raised when the target has no spikes, so the normalised distance is undefined."""

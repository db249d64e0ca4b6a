"""Exception types shared across the package."""


class SpecificationError(ValueError):
    """An input violates the documented domain of a problem or signal spec."""


class ContractViolation(ValueError):
    """A precondition of an operation does not hold (e.g. non-Hermitian input)."""


class ResourceLimitError(RuntimeError):
    """The requested instance exceeds the desk-scale limits of the dense oracle."""


class InfeasibleLayoutError(RuntimeError):
    """Physical resources requested exceed the configured capacity."""

    def __init__(self, message: str, shortfall: int):
        super().__init__(message)
        self.shortfall = shortfall

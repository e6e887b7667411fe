"""Exception types raised across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain where a function is defined."""


class ChartSingularityError(ValueError):
    """The angle chart degenerates (cos(beta) = 0)."""

    def __init__(self, message: str, t: float | None = None):
        super().__init__(message)
        self.t = t


class UnsupportedMomentumError(ValueError):
    """Initial momentum outside the supported family (u6 must be 0)."""

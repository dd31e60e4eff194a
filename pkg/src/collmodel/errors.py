"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """Argument outside its documented domain (shape, range, physicality)."""


class EmptySectorError(InvalidInputError):
    """Post-selection found no population in the requested sector."""

    def __init__(self, sector, weight):
        super().__init__(f"sector {sector!r} is empty (weight={weight:.3e})")
        self.sector = sector
        self.weight = weight


class CapacityError(ValueError):
    """Request exceeds the size the brute-force simulator is built for."""


class InvariantViolation(ArithmeticError):
    """A numerical invariant (trace, hermiticity, positivity) broke during a run."""

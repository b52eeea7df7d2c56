"""Exception hierarchy.

Numerical failures and data problems are kept in separate branches so the
CLI can map them onto distinct exit codes.
"""


class InfluenceError(Exception):
    """Base class for all errors raised by this package."""


class NumericalError(InfluenceError):
    """A computation failed or is not defined for the given inputs."""


class DataError(InfluenceError):
    """Input data could not be ingested or validated."""


# --- numerical -------------------------------------------------------------

class SingularDesign(NumericalError):
    """Design matrix is rank deficient, or the feature has no variance left."""


class InsufficientData(NumericalError):
    """Too few observations for the requested model."""


class DegenerateLeverage(NumericalError):
    """Leverage of a point is (numerically) one; removal is undefined."""


class DegenerateRemoval(NumericalError):
    """Removing the set would annihilate the remaining feature variance."""


class CombinatorialBudgetExceeded(NumericalError):
    """Exhaustive enumeration would exceed the configured subset cap."""


class NonConvergence(NumericalError):
    """An iterative fit did not converge within its iteration budget."""


class DegenerateSample(NumericalError):
    """Sample has no spread; distribution fitting is undefined."""


class InsufficientTail(NumericalError):
    """Too few tail observations for a tail-index estimate."""


class BlockTooSmall(NumericalError):
    """Requested block partition leaves blocks below the minimum size."""


# --- data ------------------------------------------------------------------

class ColumnNotFound(DataError):
    """A requested CSV column does not exist."""


class ParseError(DataError):
    """One or more CSV cells could not be parsed as numbers."""

    def __init__(self, failures):
        # failures: list of (row, column) pairs, 1-based rows as in the file
        self.failures = list(failures)
        locs = ", ".join(f"row {r}, column {c!r}" for r, c in self.failures[:10])
        more = "" if len(self.failures) <= 10 else f" (+{len(self.failures) - 10} more)"
        super().__init__(f"unparseable numeric cells: {locs}{more}")


class EmptyAfterFiltering(DataError):
    """No usable rows remain after ingestion."""

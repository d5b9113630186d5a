"""Exception hierarchy shared across the package."""


class ChangePointError(Exception):
    """Base class for all snchange errors."""


class NonRectangularError(ChangePointError):
    """Input table rows have differing lengths."""


class NonFiniteEntryError(ChangePointError):
    """Input contains NaN or infinite entries."""

    def __init__(self, row: int, col: int):
        self.row = row
        self.col = col
        super().__init__(f"non-finite entry at row {row}, column {col} (1-based)")


class EmptyError(ChangePointError):
    """Input table has no rows or no columns."""


class InvalidSplitError(ChangePointError):
    """Split index violates s <= k < m or the trimming constraints."""


class IntervalTooShortError(ChangePointError):
    """Interval is too short for the requested statistic."""


class DegenerateNormalizerError(ChangePointError):
    """Self-normalizer vanished everywhere (e.g. constant data)."""


class OrderExceedsQError(ChangePointError):
    """Requested symmetric-polynomial order exceeds the prepared maximum."""


class SizeGuardError(ChangePointError):
    """Brute-force enumeration would exceed the configured tuple budget."""


class EmptyTableError(ChangePointError):
    """Null table contains no draws."""


class BudgetExceededError(ChangePointError):
    """Projected Monte-Carlo work exceeds the configured limit."""


class MissingPValueError(ChangePointError):
    """A p-value is missing for some order q in the adaptive set."""

    def __init__(self, q: int):
        self.q = q
        super().__init__(f"missing p-value for q={q}")


class OutOfRangeError(ChangePointError):
    """A probability-like value fell outside its admissible range."""


class LengthMismatchError(ChangePointError):
    """Two segmentations refer to different series lengths."""


class EmptyListError(ChangePointError):
    """An aggregate metric was requested over an empty collection."""


class DimensionMismatchError(ChangePointError):
    """Vector dimension does not match the data dimension."""


class BadLocationError(ChangePointError):
    """Shift location outside [1, n-1] or not strictly increasing."""


class InvalidCovarianceError(ChangePointError):
    """Covariance specification parameters out of the supported range."""


class MeanOutOfRangeError(ChangePointError):
    """An induced Bernoulli mean fell outside [0, 1]."""


class NotSymmetricError(ChangePointError):
    """Adjacency matrix is not symmetric."""


class NonZeroDiagonalError(ChangePointError):
    """Adjacency matrix has a non-zero diagonal."""


class NoAdmissibleIntervalError(ChangePointError):
    """No (s, e) pair satisfies the length constraint within the range."""


class MissingCalibrationError(ChangePointError):
    """Calibration table missing or incompatible for some q."""

    def __init__(self, q: int, reason: str = "no table supplied"):
        self.q = q
        super().__init__(f"calibration for q={q}: {reason}")


class UnknownScenarioError(ChangePointError):
    """Scenario name not present in the registry."""

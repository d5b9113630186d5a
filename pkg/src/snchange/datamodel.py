"""Core data containers and validation shared by all other modules.

All public indices are 1-based: a split k means rows 1..k fall left of the
split and k+1..n fall right of it.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BadLocationError,
    EmptyError,
    IntervalTooShortError,
    NonFiniteEntryError,
    NonRectangularError,
)

SUPPORTED_ORDERS = (2, 4, 6)


def validate_even_order(q: int) -> int:
    """Check that q is a positive even integer and return it."""
    if not isinstance(q, (int, np.integer)) or isinstance(q, bool):
        raise ValueError(f"order q must be an integer, got {q!r}")
    q = int(q)
    if q < 2 or q % 2 != 0:
        raise ValueError(f"order q must be even and >= 2, got {q}")
    return q


def validate_qset(orders) -> tuple[int, ...]:
    """Canonicalize a set of even orders: sorted, distinct, nonempty."""
    qs = sorted({validate_even_order(q) for q in orders})
    if not qs:
        raise ValueError("the set of orders must be nonempty")
    return tuple(qs)


@dataclass(frozen=True)
class DataMatrix:
    """n x p panel of observations, row t = observation at time t."""

    values: np.ndarray
    names: tuple[str, ...] | None = None

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.ndim != 2:
            raise NonRectangularError(f"expected a 2-d table, got ndim={vals.ndim}")
        if vals.shape[0] < 1 or vals.shape[1] < 1:
            raise EmptyError(f"matrix must be at least 1x1, got shape {vals.shape}")
        if not np.all(np.isfinite(vals)):
            r, c = np.argwhere(~np.isfinite(vals))[0]
            raise NonFiniteEntryError(int(r) + 1, int(c) + 1)
        if self.names is not None and len(self.names) != vals.shape[1]:
            raise NonRectangularError(
                f"{len(self.names)} column names for {vals.shape[1]} columns"
            )
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]


def validate_matrix(raw, names=None) -> DataMatrix:
    """Validate a rectangular table of reals into a DataMatrix.

    Accepts nested sequences or arrays. Raises NonRectangularError for ragged
    rows, EmptyError for empty input and NonFiniteEntryError for NaN/Inf.
    """
    if isinstance(raw, np.ndarray):
        return DataMatrix(raw, names=tuple(names) if names else None)
    rows = list(raw)
    if not rows:
        raise EmptyError("no rows")
    lengths = {len(r) for r in rows}
    if len(lengths) != 1:
        raise NonRectangularError(f"row lengths differ: {sorted(lengths)}")
    if lengths == {0}:
        raise EmptyError("rows have no columns")
    return DataMatrix(np.asarray(rows, dtype=np.float64), names=tuple(names) if names else None)


@dataclass(frozen=True)
class Interval:
    """Closed 1-based index interval [s, e]."""

    s: int
    e: int

    def __post_init__(self):
        if not (1 <= self.s <= self.e):
            raise IntervalTooShortError(f"need 1 <= s <= e, got ({self.s}, {self.e})")

    @property
    def length(self) -> int:
        return self.e - self.s + 1


@dataclass(frozen=True)
class Segmentation:
    """Sorted distinct change-point indices partitioning 1..n.

    A break at k means the segment ends at index k; breaks lie in [1, n-1].
    Unsorted or duplicated input is canonicalized (sorted, deduplicated).
    """

    n: int
    breaks: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if self.n < 1:
            raise EmptyError(f"series length must be >= 1, got {self.n}")
        ks = tuple(sorted({int(k) for k in self.breaks}))
        for k in ks:
            if not (1 <= k <= self.n - 1):
                raise BadLocationError(f"break {k} outside [1, {self.n - 1}]")
        object.__setattr__(self, "breaks", ks)

    @property
    def n_segments(self) -> int:
        return len(self.breaks) + 1

    def labels(self) -> np.ndarray:
        """Segment id (0-based) for each time point 1..n."""
        edges = np.asarray(self.breaks, dtype=np.int64)
        return np.searchsorted(edges, np.arange(1, self.n + 1), side="left")


def load_csv_matrix(path_or_buffer, has_header: bool = False) -> DataMatrix:
    """Load a CSV of reals (rows = time points, columns = coordinates)."""
    if hasattr(path_or_buffer, "read"):
        text = path_or_buffer.read()
    else:
        with open(path_or_buffer, "r", encoding="utf-8") as fh:
            text = fh.read()
    reader = csv.reader(io.StringIO(text))
    rows = [row for row in reader if row]
    if not rows:
        raise EmptyError("empty CSV file")
    names = None
    if has_header:
        names = [c.strip() for c in rows[0]]
        rows = rows[1:]
        if not rows:
            raise EmptyError("CSV has a header but no data rows")
    lengths = {len(r) for r in rows}
    if len(lengths) != 1:
        raise NonRectangularError(f"CSV row lengths differ: {sorted(lengths)}")
    try:
        data = [[float(cell) for cell in row] for row in rows]
    except ValueError as exc:
        raise NonRectangularError(f"CSV parse failure: {exc}") from exc
    return validate_matrix(data, names=names)

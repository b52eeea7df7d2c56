"""Dataset container and CSV ingestion."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ColumnNotFound,
    EmptyAfterFiltering,
    InsufficientData,
    ParseError,
)


def _as_readonly(a, dtype=float, ndim=1):
    arr = np.asarray(a, dtype=dtype)
    if arr.ndim != ndim:
        raise ValueError(f"expected {ndim}-d array, got shape {arr.shape}")
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Dataset:
    """A regression sample: feature of interest, outcome, optional controls.

    Parameters
    ----------
    x : array, shape (N,)
        Feature of interest.
    y : array, shape (N,)
        Outcome.
    controls : array, shape (N, C), optional
        Control features that are partialled out before influence analysis.
    labels : sequence of str, optional
        Unique row identifiers.
    intercept : bool
        Whether an intercept column is included among the controls.
    """

    x: np.ndarray
    y: np.ndarray
    controls: np.ndarray | None = None
    labels: tuple[str, ...] | None = None
    intercept: bool = False

    def __post_init__(self):
        object.__setattr__(self, "x", _as_readonly(self.x))
        object.__setattr__(self, "y", _as_readonly(self.y))
        n = self.x.shape[0]
        if self.y.shape[0] != n:
            raise ValueError(f"x has {n} rows but y has {self.y.shape[0]}")
        if n < 3:
            raise InsufficientData(f"need at least 3 observations, got {n}")
        if self.controls is not None:
            ctrl = _as_readonly(self.controls, ndim=2)
            if ctrl.shape[0] != n:
                raise ValueError(
                    f"controls have {ctrl.shape[0]} rows, expected {n}"
                )
            object.__setattr__(self, "controls", ctrl)
        bad = ~np.isfinite(self.x) | ~np.isfinite(self.y)
        if self.controls is not None:
            bad |= ~np.isfinite(self.controls).all(axis=1)
        if bad.any():
            rows = np.flatnonzero(bad)[:10].tolist()
            raise ValueError(f"non-finite values in rows {rows}")
        if self.labels is not None:
            labels = tuple(str(l) for l in self.labels)
            if len(labels) != n:
                raise ValueError(f"{len(labels)} labels for {n} rows")
            if len(set(labels)) != n:
                raise ValueError("labels must be unique")
            object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def n_controls(self) -> int:
        return 0 if self.controls is None else self.controls.shape[1]

    def subset(self, keep) -> "Dataset":
        """Return the dataset restricted to the row indices in ``keep``."""
        keep = np.asarray(keep, dtype=int)
        return Dataset(
            x=self.x[keep],
            y=self.y[keep],
            controls=None if self.controls is None else self.controls[keep],
            labels=None if self.labels is None else
            tuple(self.labels[i] for i in keep),
            intercept=self.intercept,
        )

    def without(self, drop) -> "Dataset":
        """Return the dataset with the row indices in ``drop`` removed."""
        mask = np.ones(self.n, dtype=bool)
        mask[np.asarray(list(drop), dtype=int)] = False
        return self.subset(np.flatnonzero(mask))


def _resolve_column(name_or_index, header, width):
    """Map a column given by name or zero-based index to an index."""
    if header is not None and name_or_index in header:
        return header.index(name_or_index)
    try:
        idx = int(name_or_index)
    except (TypeError, ValueError):
        raise ColumnNotFound(f"column {name_or_index!r} not found")
    if not 0 <= idx < width:
        raise ColumnNotFound(f"column index {idx} out of range (width {width})")
    return idx


def load_csv(
    path,
    feature_col,
    target_col,
    control_cols=(),
    label_col=None,
    has_header=True,
    intercept=False,
):
    """Load a :class:`Dataset` from an RFC-4180 CSV file.

    Columns are addressed by header name or by zero-based index. Rows with
    missing or unparseable numeric cells are rejected; the error lists the
    offending (row, column) locations.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        rows = [row for row in reader if row]
    if not rows:
        raise EmptyAfterFiltering(f"{path}: file is empty")

    header = None
    if has_header:
        header = rows[0]
        rows = rows[1:]
    if not rows:
        raise EmptyAfterFiltering(f"{path}: no data rows")

    width = len(rows[0])
    fi = _resolve_column(feature_col, header, width)
    ti = _resolve_column(target_col, header, width)
    cis = [_resolve_column(c, header, width) for c in control_cols]
    li = None if label_col is None else _resolve_column(label_col, header, width)

    def colname(i):
        return header[i] if header is not None else i

    numeric_cols = [fi, ti, *cis]
    failures = []
    parsed = []
    labels = [] if li is not None else None
    first_row = 2 if has_header else 1  # 1-based file rows
    for offset, row in enumerate(rows):
        vals = []
        for ci in numeric_cols:
            cell = row[ci].strip() if ci < len(row) else ""
            try:
                v = float(cell)
                if not np.isfinite(v):
                    raise ValueError
            except ValueError:
                failures.append((first_row + offset, colname(ci)))
                v = np.nan
            vals.append(v)
        parsed.append(vals)
        if labels is not None:
            labels.append(row[li] if li < len(row) else "")
    if failures:
        raise ParseError(failures)

    arr = np.asarray(parsed, dtype=float)
    return Dataset(
        x=arr[:, 0],
        y=arr[:, 1],
        controls=arr[:, 2:] if cis else None,
        labels=labels,
        intercept=intercept,
    )

"""Two-way contingency tables and their empirical probability tables."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from fassoc.errors import (
    DimensionError,
    EmptyTableError,
    MarginalZeroError,
    NegativeCountError,
    NegativeProbabilityError,
    NotNormalizedError,
    ValidationError,
)

SUM_TOLERANCE = 1e-12
# accepts grids printed to 4 decimals (rounding error up to r*c*5e-5)
RENORMALIZE_TOLERANCE = 1e-3


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def _check_grid_shape(grid) -> np.ndarray:
    rows = [list(r) for r in grid]
    if len(rows) < 2:
        raise DimensionError(f"need at least 2 rows, got {len(rows)}")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise DimensionError(f"ragged grid: row lengths {sorted(widths)}")
    (c,) = widths
    if c < 2:
        raise DimensionError(f"need at least 2 columns, got {c}")
    return np.array(rows)


@dataclass(frozen=True, eq=False)
class ContingencyTable:
    """Observed r x c cell counts."""

    counts: np.ndarray
    n: int = field(init=False)

    def __post_init__(self):
        counts = np.asarray(self.counts)
        if counts.ndim != 2 or counts.shape[0] < 2 or counts.shape[1] < 2:
            raise DimensionError(f"expected an r x c grid with r, c >= 2, got shape {counts.shape}")
        if not np.issubdtype(counts.dtype, np.integer):
            if not np.all(np.isfinite(counts)) or np.any(counts != np.round(counts)):
                raise ValidationError("counts must be integers")
        counts = counts.astype(np.int64)
        if np.any(counts < 0):
            raise NegativeCountError("cell counts must be nonnegative")
        total = int(counts.sum())
        if total == 0:
            raise EmptyTableError("table has no observations")
        object.__setattr__(self, "counts", _frozen(counts))
        object.__setattr__(self, "n", total)

    @property
    def shape(self) -> tuple[int, int]:
        return self.counts.shape

    def transpose(self) -> ContingencyTable:
        return ContingencyTable(self.counts.T.copy())

    def __eq__(self, other):
        if not isinstance(other, ContingencyTable):
            return NotImplemented
        return np.array_equal(self.counts, other.counts)

    def __repr__(self):
        return f"ContingencyTable(shape={self.shape}, n={self.n})"


@dataclass(frozen=True, eq=False)
class ProbabilityTable:
    """Joint cell probabilities with cached marginals.

    Construction enforces the marginal positivity rule for the natural
    orientation: all row marginals positive when r <= c, all column marginals
    positive when r > c.
    """

    probs: np.ndarray
    row_marginals: np.ndarray = field(init=False)
    col_marginals: np.ndarray = field(init=False)

    def __post_init__(self):
        p = np.array(self.probs, dtype=float)
        if p.ndim != 2 or p.shape[0] < 2 or p.shape[1] < 2:
            raise DimensionError(f"expected an r x c grid with r, c >= 2, got shape {p.shape}")
        if not np.all(np.isfinite(p)):
            raise ValidationError("probabilities must be finite")
        if np.any(p < 0):
            raise NegativeProbabilityError("cell probabilities must be nonnegative")
        if abs(p.sum() - 1.0) > SUM_TOLERANCE:
            raise NotNormalizedError(f"cells sum to {p.sum()!r}, not 1")
        rows = p.sum(axis=1)
        cols = p.sum(axis=0)
        r, c = p.shape
        if r <= c and np.any(rows == 0):
            raise MarginalZeroError(f"row marginals {np.flatnonzero(rows == 0).tolist()} are zero (r <= c)")
        if r > c and np.any(cols == 0):
            raise MarginalZeroError(f"column marginals {np.flatnonzero(cols == 0).tolist()} are zero (r > c)")
        object.__setattr__(self, "probs", _frozen(p))
        object.__setattr__(self, "row_marginals", _frozen(rows))
        object.__setattr__(self, "col_marginals", _frozen(cols))

    @property
    def shape(self) -> tuple[int, int]:
        return self.probs.shape

    def transpose(self) -> ProbabilityTable:
        return ProbabilityTable(self.probs.T.copy())

    def independence(self) -> np.ndarray:
        """Outer product of the marginals."""
        return np.outer(self.row_marginals, self.col_marginals)

    def __eq__(self, other):
        if not isinstance(other, ProbabilityTable):
            return NotImplemented
        return np.array_equal(self.probs, other.probs)

    def __repr__(self):
        return f"ProbabilityTable(shape={self.shape})"


def table_from_counts(counts: Sequence[Sequence[int]] | np.ndarray) -> ContingencyTable:
    if isinstance(counts, np.ndarray):
        if counts.ndim != 2:
            raise DimensionError(f"expected a 2-d grid, got {counts.ndim}-d")
        return ContingencyTable(counts)
    return ContingencyTable(_check_grid_shape(counts))


def to_probability(table: ContingencyTable) -> ProbabilityTable:
    return ProbabilityTable(table.counts / table.n)


def probability_from_grid(probs, tol: float = RENORMALIZE_TOLERANCE) -> ProbabilityTable:
    """Validate a probability grid, renormalising sums within ``tol`` of one."""
    p = probs if isinstance(probs, np.ndarray) else _check_grid_shape(probs)
    p = np.asarray(p, dtype=float)
    if p.ndim != 2:
        raise DimensionError(f"expected a 2-d grid, got {p.ndim}-d")
    if np.any(p < 0):
        raise NegativeProbabilityError("cell probabilities must be nonnegative")
    total = p.sum()
    if not np.isfinite(total) or abs(total - 1.0) > tol:
        raise NotNormalizedError(f"cells sum to {total!r}; must be within {tol} of 1")
    return ProbabilityTable(p / total)


# --- CSV ingestion -----------------------------------------------------------


def _is_number(token: str) -> bool:
    try:
        float(token)
    except ValueError:
        return False
    return True


def parse_grid(text: str) -> tuple[list[list[str]], list[str] | None, list[str] | None]:
    """Split CSV text into numeric tokens, stripping an optional header row/column.

    A header row is detected when any token of the first row is non-numeric
    (an empty corner cell counts as non-numeric); a header column when the
    first token of every remaining row is non-numeric.
    """
    rows = [[tok.strip() for tok in row] for row in csv.reader(io.StringIO(text))]
    rows = [row for row in rows if any(tok for tok in row)]
    if not rows:
        raise DimensionError("empty CSV input")
    col_labels = None
    if any(not _is_number(tok) for tok in rows[0]):
        col_labels, rows = rows[0], rows[1:]
    row_labels = None
    if rows and all(not _is_number(row[0]) for row in rows):
        row_labels = [row[0] for row in rows]
        rows = [row[1:] for row in rows]
        if col_labels is not None and len(col_labels) == len(rows[0]) + 1:
            col_labels = col_labels[1:]
    for row in rows:
        for tok in row:
            if not _is_number(tok):
                raise ValueError(f"non-numeric cell {tok!r}")
    return rows, row_labels, col_labels


def _looks_integral(tokens: list[list[str]]) -> bool:
    for row in tokens:
        for tok in row:
            try:
                int(tok)
            except ValueError:
                return False
    return True


def read_table(path: str | Path, kind: str = "auto") -> ContingencyTable | ProbabilityTable:
    """Load a counts or probability table from a CSV file.

    ``kind`` is ``"counts"``, ``"probs"`` or ``"auto"`` (integers -> counts,
    anything else -> probabilities).
    """
    text = Path(path).read_text()
    tokens, _, _ = parse_grid(text)
    if kind == "auto":
        kind = "counts" if _looks_integral(tokens) else "probs"
    if kind == "counts":
        if not _looks_integral(tokens):
            raise ValueError("counts file must contain only integers")
        return table_from_counts([[int(t) for t in row] for row in tokens])
    if kind == "probs":
        return probability_from_grid([[float(t) for t in row] for row in tokens])
    raise ValueError(f"unknown table kind {kind!r}")


def format_grid(grid: np.ndarray, decimals: int | None = 4) -> str:
    """Render a grid as CSV; ``decimals=None`` writes round-trippable reprs."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    for row in np.asarray(grid):
        if decimals is None:
            writer.writerow([repr(float(v)) for v in row])
        else:
            writer.writerow([f"{v:.{decimals}f}" for v in row])
    return out.getvalue()

"""Typed tabular datasets: schema declaration, CSV I/O, column statistics.

Values are stored in a single float64 matrix. Continuous columns hold the
raw value, binary columns hold 0/1, categorical columns hold the level
index. The schema carries the interpretation.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError, SchemaError

CONTINUOUS = "continuous"
BINARY = "binary"
CATEGORICAL = "categorical"

ROLE_FEATURE = "feature"
ROLE_PROTECTED = "protected"
ROLE_LABEL = "label"

_KINDS = (CONTINUOUS, BINARY, CATEGORICAL)
_ROLES = (ROLE_FEATURE, ROLE_PROTECTED, ROLE_LABEL)


@dataclass(frozen=True)
class ColumnSpec:
    """One column: name, value kind, and its role in modeling."""

    name: str
    kind: str
    role: str = ROLE_FEATURE
    levels: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.name:
            raise SchemaError("column name must be nonempty")
        if self.kind not in _KINDS:
            raise SchemaError(f"unknown kind {self.kind!r} for column {self.name!r}")
        if self.role not in _ROLES:
            raise SchemaError(f"unknown role {self.role!r} for column {self.name!r}")
        if self.kind == CATEGORICAL:
            if len(self.levels) < 2:
                raise SchemaError(f"categorical column {self.name!r} needs >= 2 levels")
            if len(set(self.levels)) != len(self.levels):
                raise SchemaError(f"duplicate levels in column {self.name!r}")
        elif self.levels:
            raise SchemaError(f"levels given for non-categorical column {self.name!r}")
        if self.role == ROLE_PROTECTED and self.kind != BINARY:
            raise SchemaError(f"protected column {self.name!r} must be binary")
        # labels: binary or categorical for classification, continuous for regression


@dataclass(frozen=True)
class Schema:
    """Ordered column specs with exactly one protected and at most one label column."""

    columns: tuple[ColumnSpec, ...]

    def __post_init__(self):
        object.__setattr__(self, "columns", tuple(self.columns))
        names = [c.name for c in self.columns]
        if len(set(names)) != len(names):
            raise SchemaError("column names must be unique")
        n_protected = sum(c.role == ROLE_PROTECTED for c in self.columns)
        n_label = sum(c.role == ROLE_LABEL for c in self.columns)
        if n_protected != 1:
            raise SchemaError(f"exactly one protected column required, got {n_protected}")
        if n_label > 1:
            raise SchemaError(f"at most one label column allowed, got {n_label}")

    @property
    def d(self) -> int:
        return len(self.columns)

    @property
    def names(self) -> list[str]:
        return [c.name for c in self.columns]

    @property
    def protected_index(self) -> int:
        return next(i for i, c in enumerate(self.columns) if c.role == ROLE_PROTECTED)

    @property
    def label_index(self) -> int | None:
        for i, c in enumerate(self.columns):
            if c.role == ROLE_LABEL:
                return i
        return None

    def index_of(self, name: str) -> int:
        for i, c in enumerate(self.columns):
            if c.name == name:
                return i
        raise SchemaError(f"no column named {name!r}")


@dataclass(frozen=True)
class Dataset:
    """Immutable n x d value table plus its schema."""

    schema: Schema
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise DataError("values must be a 2-d array")
        n, d = values.shape
        if n < 1:
            raise DataError("dataset needs at least one row")
        if d != self.schema.d:
            raise DataError(f"schema has {self.schema.d} columns, values have {d}")
        if d < 2:
            raise DataError("dataset needs at least two columns")
        _validate_values(self.schema, values)
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]

    def column(self, name: str) -> np.ndarray:
        return self.values[:, self.schema.index_of(name)]

    def take(self, indices) -> "Dataset":
        return Dataset(self.schema, self.values[np.asarray(indices, dtype=int)])


def _validate_values(schema: Schema, values: np.ndarray):
    if not np.all(np.isfinite(values)):
        bad = np.argwhere(~np.isfinite(values))[0]
        raise DataError(f"non-finite value at row {bad[0]}, column {schema.columns[bad[1]].name!r}")
    for j, col in enumerate(schema.columns):
        v = values[:, j]
        if col.kind == BINARY:
            if not np.all((v == 0.0) | (v == 1.0)):
                bad = int(np.argmax((v != 0.0) & (v != 1.0)))
                raise DataError(f"non-binary value at row {bad}, column {col.name!r}")
        elif col.kind == CATEGORICAL:
            ok = (v == np.round(v)) & (v >= 0) & (v < len(col.levels))
            if not np.all(ok):
                bad = int(np.argmax(~ok))
                raise DataError(f"invalid level index at row {bad}, column {col.name!r}")


# -- schema text format ----------------------------------------------------
#
# One line per column, in column order:
#     <name> <kind> <role>
# where kind is continuous | binary | categorical(level1|level2|...).
# Blank lines and lines starting with '#' are ignored.

def schema_to_text(schema: Schema) -> str:
    lines = ["# ffpdg schema: <name> <kind> <role>"]
    for c in schema.columns:
        kind = c.kind
        if c.kind == CATEGORICAL:
            kind = f"categorical({'|'.join(c.levels)})"
        lines.append(f"{c.name} {kind} {c.role}")
    return "\n".join(lines) + "\n"


def schema_from_text(text: str) -> Schema:
    cols = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise SchemaError(f"schema line {lineno}: expected '<name> <kind> <role>', got {raw!r}")
        name, kind, role = parts
        levels: tuple[str, ...] = ()
        if kind.startswith("categorical(") and kind.endswith(")"):
            levels = tuple(kind[len("categorical("):-1].split("|"))
            kind = CATEGORICAL
        cols.append(ColumnSpec(name=name, kind=kind, role=role, levels=levels))
    return Schema(tuple(cols))


def load_schema(path) -> Schema:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return schema_from_text(fh.read())
    except OSError as exc:
        raise SchemaError(f"cannot read schema file {path}: {exc}") from exc


def save_schema(schema: Schema, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(schema_to_text(schema))


# -- CSV I/O -----------------------------------------------------------------

def load_csv(path, schema: Schema) -> Dataset:
    """Parse a header-first CSV into a Dataset, validating every cell.

    Continuous cells must parse as decimal numbers, binary cells as 0/1,
    categorical cells must be a declared level string. Errors name the
    offending row and column.
    """
    try:
        fh = open(path, "r", encoding="utf-8", newline="")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        if header != schema.names:
            raise DataError(f"{path}: header {header!r} does not match schema columns {schema.names!r}")
        level_maps = [
            {lvl: float(i) for i, lvl in enumerate(c.levels)} if c.kind == CATEGORICAL else None
            for c in schema.columns
        ]
        rows = []
        for rownum, cells in enumerate(reader):
            if len(cells) != schema.d:
                raise DataError(f"{path}: row {rownum} has {len(cells)} cells, expected {schema.d}")
            parsed = np.empty(schema.d)
            for j, (cell, col) in enumerate(zip(cells, schema.columns)):
                cell = cell.strip()
                if col.kind == CATEGORICAL:
                    try:
                        parsed[j] = level_maps[j][cell]
                    except KeyError:
                        raise DataError(
                            f"{path}: row {rownum}, column {col.name!r}: unknown level {cell!r}"
                        ) from None
                else:
                    try:
                        value = float(cell)
                    except ValueError:
                        raise DataError(
                            f"{path}: row {rownum}, column {col.name!r}: cannot parse {cell!r}"
                        ) from None
                    if col.kind == BINARY and value not in (0.0, 1.0):
                        raise DataError(
                            f"{path}: row {rownum}, column {col.name!r}: binary cell must be 0 or 1, got {cell!r}"
                        )
                    parsed[j] = value
            rows.append(parsed)
    if not rows:
        raise DataError(f"{path}: no data rows")
    return Dataset(schema, np.vstack(rows))


def save_csv(dataset: Dataset, path):
    """Write a Dataset as CSV so that load_csv(save_csv(D)) == D.

    Binary and categorical cells are written exactly (categorical as level
    strings); continuous cells use up to 17 significant digits, enough for
    a bit-exact float64 round trip.
    """
    schema = dataset.schema
    try:
        fh = open(path, "w", encoding="utf-8", newline="")
    except OSError as exc:
        raise DataError(f"cannot write {path}: {exc}") from exc
    with fh:
        writer = csv.writer(fh)
        writer.writerow(schema.names)
        for row in dataset.values:
            cells = []
            for value, col in zip(row, schema.columns):
                if col.kind == CATEGORICAL:
                    cells.append(col.levels[int(value)])
                elif col.kind == BINARY:
                    cells.append(str(int(value)))
                else:
                    cells.append(format(value, ".17g"))
            writer.writerow(cells)


# -- statistics and splitting -------------------------------------------------

@dataclass(frozen=True)
class ColumnStats:
    """Per-column min/max/mean and nearest-rank percentiles."""

    quantiles: tuple[float, ...]
    mins: np.ndarray
    maxs: np.ndarray
    means: np.ndarray
    percentiles: np.ndarray  # shape (len(quantiles), d)
    positive_rates: np.ndarray = field(default=None)  # binary columns only; NaN elsewhere


def nearest_rank(sorted_values: np.ndarray, q: float) -> float:
    """Nearest-rank percentile: the ceil(q*n)-th smallest value (1-indexed)."""
    n = len(sorted_values)
    rank = max(1, math.ceil(q * n))
    return float(sorted_values[rank - 1])


def column_stats(dataset: Dataset, quantiles=(0.25, 0.5, 0.75)) -> ColumnStats:
    quantiles = tuple(float(q) for q in quantiles)
    if not quantiles:
        raise DataError("quantile list must be nonempty")
    for q in quantiles:
        if not 0.0 <= q <= 1.0:
            raise DataError(f"quantile {q} outside [0, 1]")
    values = dataset.values
    order = np.sort(values, axis=0)
    pct = np.empty((len(quantiles), dataset.d))
    for i, q in enumerate(quantiles):
        for j in range(dataset.d):
            pct[i, j] = nearest_rank(order[:, j], q)
    rates = np.full(dataset.d, np.nan)
    for j, col in enumerate(dataset.schema.columns):
        if col.kind == BINARY:
            rates[j] = values[:, j].mean()
    return ColumnStats(
        quantiles=quantiles,
        mins=order[0].copy(),
        maxs=order[-1].copy(),
        means=values.mean(axis=0),
        percentiles=pct,
        positive_rates=rates,
    )


def split(dataset: Dataset, fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    """Disjoint row partition of sizes (ceil(f*n), n - ceil(f*n)), seeded."""
    if not 0.0 < fraction < 1.0:
        raise DataError(f"fraction {fraction} outside (0, 1)")
    if dataset.n < 2:
        raise DataError("need at least two rows to split")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(dataset.n)
    k = math.ceil(fraction * dataset.n)
    return dataset.take(perm[:k]), dataset.take(perm[k:])

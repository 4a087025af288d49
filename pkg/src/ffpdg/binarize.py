"""Discretization of datasets into binary codes and inversion back to rows.

A CodeBook remembers how each source column maps to bits (quantile
thresholds for continuous columns, identity for binary, one-hot for
categorical) and which original rows produced each observed code. Codes
that were never observed are inverted through their nearest observed
code in Hamming distance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import BINARY, CATEGORICAL, CONTINUOUS, ColumnSpec, Dataset, Schema
from .errors import DataError, SchemaError


@dataclass(frozen=True)
class BitGroup:
    """Bits produced by one source column."""

    column: str
    kind: str
    bit_indices: tuple[int, ...]
    thresholds: tuple[float, ...] = ()  # continuous only, one per bit
    levels: tuple[str, ...] = ()        # categorical only, one per bit


@dataclass(frozen=True)
class CodeBook:
    """Bit layout plus the observed code -> source rows dictionary."""

    schema: Schema
    m: int
    bit_layout: tuple[BitGroup, ...]
    keys: np.ndarray      # (k, m) uint8, lexicographically sorted, unique
    row_groups: tuple[np.ndarray, ...]  # row indices into `rows` per key
    rows: np.ndarray      # original-space values the indices point into

    def entry_count(self) -> int:
        return len(self.keys)

    def bit_for_column(self, index: int) -> int:
        """Bit index of a single-bit (binary) source column."""
        group = self.bit_layout[index]
        if len(group.bit_indices) != 1:
            raise SchemaError(f"column {group.column!r} maps to {len(group.bit_indices)} bits")
        return group.bit_indices[0]

    def summary(self) -> str:
        """Human-readable layout and entry counts for audit output."""
        lines = [f"bits={self.m} entries={self.entry_count()} rows={len(self.rows)}"]
        for g in self.bit_layout:
            detail = ""
            if g.kind == CONTINUOUS:
                detail = " thresholds=" + ",".join(format(t, ".6g") for t in g.thresholds)
            elif g.kind == CATEGORICAL:
                detail = " levels=" + ",".join(g.levels)
            bits = ",".join(str(b) for b in g.bit_indices)
            lines.append(f"column={g.column} kind={g.kind} bits={bits}{detail}")
        return "\n".join(lines)


def _interp_quantile(sorted_values: np.ndarray, q: float) -> float:
    # Linear-interpolation quantile of an already sorted 1-d array.
    n = len(sorted_values)
    pos = q * (n - 1)
    lo = int(np.floor(pos))
    hi = min(lo + 1, n - 1)
    frac = pos - lo
    return float(sorted_values[lo] * (1 - frac) + sorted_values[hi] * frac)


def _column_bits(col: ColumnSpec, values: np.ndarray, bins: int, offset: int):
    """Binarize one column; returns (bits matrix, BitGroup)."""
    if col.kind == BINARY:
        bits = values[:, None].astype(np.uint8)
        group = BitGroup(col.name, BINARY, (offset,))
    elif col.kind == CATEGORICAL:
        k = len(col.levels)
        bits = np.zeros((len(values), k), dtype=np.uint8)
        bits[np.arange(len(values)), values.astype(int)] = 1
        group = BitGroup(col.name, CATEGORICAL, tuple(range(offset, offset + k)), levels=col.levels)
    else:
        order = np.sort(values)
        thresholds = tuple(_interp_quantile(order, (j + 1) / (bins + 1)) for j in range(bins))
        bits = (values[:, None] >= np.asarray(thresholds)[None, :]).astype(np.uint8)
        group = BitGroup(col.name, CONTINUOUS, tuple(range(offset, offset + bins)), thresholds=thresholds)
    return bits, group


def build_codebook(dataset: Dataset, bins_per_continuous: int = 1) -> tuple[np.ndarray, CodeBook]:
    """Binarize a dataset and index every row under its code.

    Continuous columns get `bins_per_continuous` bits with thresholds at
    the 1/(bins+1), ..., bins/(bins+1) quantiles (bit = 1 iff value >=
    threshold), binary columns one identity bit, categorical columns a
    one-hot block. Returns the n x m binary matrix and the CodeBook.
    """
    if bins_per_continuous < 1:
        raise DataError("bins_per_continuous must be >= 1")
    blocks = []
    layout = []
    offset = 0
    for j, col in enumerate(dataset.schema.columns):
        bits, group = _column_bits(col, dataset.values[:, j], bins_per_continuous, offset)
        blocks.append(bits)
        layout.append(group)
        offset += bits.shape[1]
    binary = np.hstack(blocks)
    keys, inverse = np.unique(binary, axis=0, return_inverse=True)
    groups = tuple(np.flatnonzero(inverse == i) for i in range(len(keys)))
    codebook = CodeBook(
        schema=dataset.schema,
        m=binary.shape[1],
        bit_layout=tuple(layout),
        keys=keys.astype(np.uint8),
        row_groups=groups,
        rows=dataset.values,
    )
    return binary, codebook


def encode_row(row, codebook: CodeBook) -> np.ndarray:
    """Map one original-space row to its code under the codebook layout."""
    row = np.asarray(row, dtype=np.float64)
    if row.shape != (codebook.schema.d,):
        raise SchemaError(f"row has shape {row.shape}, schema expects ({codebook.schema.d},)")
    bits = np.zeros(codebook.m, dtype=np.uint8)
    for j, group in enumerate(codebook.bit_layout):
        value = row[j]
        if group.kind == BINARY:
            bits[group.bit_indices[0]] = int(value)
        elif group.kind == CATEGORICAL:
            bits[group.bit_indices[int(value)]] = 1
        else:
            for bit, t in zip(group.bit_indices, group.thresholds):
                bits[bit] = 1 if value >= t else 0
    return bits


def _nearest_key_index(code: np.ndarray, keys: np.ndarray) -> int:
    """Index of the minimum-Hamming key; ties go to the lexicographically smallest.

    Keys are stored sorted, so the first argmin is the lexicographic winner.
    """
    distances = np.abs(keys.astype(np.int16) - code.astype(np.int16)).sum(axis=1)
    return int(np.argmin(distances))


def _exact_key_index(code: np.ndarray, codebook: CodeBook) -> int | None:
    # binary search over the lexicographically sorted keys
    keys = codebook.keys
    lo, hi = 0, len(keys)
    code_t = tuple(int(b) for b in code)
    while lo < hi:
        mid = (lo + hi) // 2
        key_t = tuple(int(b) for b in keys[mid])
        if key_t < code_t:
            lo = mid + 1
        elif key_t > code_t:
            hi = mid
        else:
            return mid
    return None


def inverse_map(code, codebook: CodeBook, seed: int) -> np.ndarray:
    """Invert one code to an original-space row.

    If the code was observed, sample uniformly among the rows stored under
    it; otherwise sample among the rows of the nearest observed code in
    Hamming distance (ties broken by the lexicographically smallest key).
    Deterministic for a fixed seed.
    """
    rng = np.random.default_rng(seed)
    return _invert_one(np.asarray(code, dtype=np.uint8), codebook, rng)


def _invert_one(code: np.ndarray, codebook: CodeBook, rng: np.random.Generator) -> np.ndarray:
    if codebook.entry_count() == 0:
        raise DataError("codebook has no entries")
    if code.shape != (codebook.m,):
        raise DataError(f"code length {code.shape} does not match m={codebook.m}")
    idx = _exact_key_index(code, codebook)
    if idx is None:
        idx = _nearest_key_index(code, codebook.keys)
    rows = codebook.row_groups[idx]
    return codebook.rows[rng.choice(rows)].copy()


def decode_codes(codes: np.ndarray, codebook: CodeBook, seed: int) -> np.ndarray:
    """Invert a batch of codes with one shared generator.

    Duplicate query codes are resolved once (nearest-key search) and their
    rows sampled in a single vectorized draw, so decoding n codes costs
    one Hamming scan per distinct code. Row order follows the input.
    """
    codes = np.asarray(codes, dtype=np.uint8)
    if codes.ndim != 2 or codes.shape[1] != codebook.m:
        raise DataError(f"codes must be (n, {codebook.m})")
    rng = np.random.default_rng(seed)
    uniq, inverse = np.unique(codes, axis=0, return_inverse=True)
    out = np.empty((len(codes), codebook.schema.d))
    for u, code in enumerate(uniq):
        idx = _exact_key_index(code, codebook)
        if idx is None:
            idx = _nearest_key_index(code, codebook.keys)
        where = np.flatnonzero(inverse == u)
        picks = rng.choice(codebook.row_groups[idx], size=len(where))
        out[where] = codebook.rows[picks]
    return out

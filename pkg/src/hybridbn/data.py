"""Discrete datasets: CSV I/O, contingency tables, cross-validation folds.

Variables are categorical with 0-based level indices. A dataset keeps the
original tokens per level so predictions and exports can be mapped back.
Datasets are immutable after construction and safe for concurrent readers.
"""

import csv
from dataclasses import dataclass

import numpy as np

# Mixed-radix codes are built in int64; compress before products pass this.
_CODE_LIMIT = 2**62


class DataError(ValueError):
    """An input file or dataset violates the format contract."""


@dataclass(frozen=True)
class CategoricalDataset:
    """Column-oriented table of discrete variables.

    Parameters
    ----------
    names : tuple of str
        One name per variable (column).
    levels : tuple of tuple of str
        levels[i][v] is the token behind level index v of variable i;
        the arity of variable i is len(levels[i]).
    rows : ndarray of shape (n, d)
        Integer level indices, 0 <= rows[:, i] < arity(i).
    """

    names: tuple
    levels: tuple
    rows: np.ndarray

    def __post_init__(self):
        rows = np.asarray(self.rows)
        if rows.ndim != 2:
            raise DataError("rows must be a 2-d array")
        if rows.shape[1] != len(self.names) or len(self.names) != len(self.levels):
            raise DataError("names, levels and row width disagree")
        rows = np.ascontiguousarray(rows, dtype=np.int32)
        for i, lv in enumerate(self.levels):
            if len(lv) < 1:
                raise DataError(f"variable {self.names[i]!r} has no levels")
            if rows.shape[0] and (rows[:, i].min() < 0 or rows[:, i].max() >= len(lv)):
                raise DataError(f"level index out of range in column {self.names[i]!r}")
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "levels", tuple(tuple(lv) for lv in self.levels))

    @property
    def n(self):
        return self.rows.shape[0]

    @property
    def d(self):
        return self.rows.shape[1]

    @property
    def arities(self):
        return tuple(len(lv) for lv in self.levels)

    def arity(self, i):
        return len(self.levels[i])

    def column_index(self, name):
        try:
            return self.names.index(name)
        except ValueError:
            raise DataError(f"unknown column {name!r}") from None

    @classmethod
    def from_array(cls, rows, arities=None, names=None):
        """Build a dataset from an integer matrix.

        Arities default to max+1 per column; tokens default to the decimal
        digits of the level indices.
        """
        rows = np.asarray(rows, dtype=np.int32)
        if rows.ndim != 2:
            raise DataError("rows must be a 2-d array")
        d = rows.shape[1]
        if arities is None:
            if rows.shape[0] == 0:
                raise DataError("cannot infer arities from an empty matrix")
            arities = [int(rows[:, i].max()) + 1 for i in range(d)]
        if names is None:
            names = [f"v{i}" for i in range(d)]
        levels = [tuple(str(v) for v in range(a)) for a in arities]
        return cls(tuple(names), tuple(levels), rows)

    def subset_rows(self, indices):
        """Dataset restricted to the given row indices (metadata shared)."""
        idx = np.asarray(indices, dtype=np.int64)
        return CategoricalDataset(self.names, self.levels, self.rows[idx])


@dataclass(frozen=True)
class ContingencyTable:
    """Joint counts n_ijk of a variable pair over observed Z-configurations.

    counts has shape (r, c, l); the last axis indexes the conditioning-set
    configurations that actually occur in the data (zero strata are never
    materialized).
    """

    r: int
    c: int
    l: int
    counts: np.ndarray
    n: int

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.shape != (self.r, self.c, self.l):
            raise ValueError("counts shape disagrees with (r, c, l)")
        if int(counts.sum()) != self.n:
            raise ValueError("counts do not sum to n")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)


@dataclass(frozen=True)
class FoldAssignment:
    """Partition of rows into k cross-validation folds."""

    fold_of_row: np.ndarray
    k: int

    def test_indices(self, fold):
        return np.flatnonzero(self.fold_of_row == fold)

    def train_indices(self, fold):
        return np.flatnonzero(self.fold_of_row != fold)


def observed_config_codes(rows, arities):
    """Compress the given columns into dense codes of observed configurations.

    Returns (codes, l) where codes maps each row to an index in [0, l) and l
    is the number of distinct configurations present. Codes are mixed-radix
    with intermediate compression, so arbitrarily many columns are safe.
    """
    rows = np.asarray(rows)
    n, m = rows.shape
    if m == 0:
        return np.zeros(n, dtype=np.int64), 1
    code = rows[:, 0].astype(np.int64)
    cap = int(arities[0])
    for t in range(1, m):
        a = int(arities[t])
        if cap * a >= _CODE_LIMIT:
            _, code = np.unique(code, return_inverse=True)
            cap = int(code.max()) + 1 if n else 1
        code = code * a + rows[:, t]
        cap *= a
    _, codes = np.unique(code, return_inverse=True)
    l = int(codes.max()) + 1 if n else 0
    return codes.astype(np.int64), l


def nominal_config_codes(rows, arities):
    """Mixed-radix codes over the full nominal space (last column fastest).

    The caller must keep prod(arities) below 2**62; parent sets in this
    package are small, so that always holds.
    """
    rows = np.asarray(rows)
    n, m = rows.shape
    if m == 0:
        return np.zeros(n, dtype=np.int64)
    q = 1
    for a in arities:
        q *= int(a)
    if q >= _CODE_LIMIT:
        raise ValueError("nominal configuration space too large to encode")
    code = np.zeros(n, dtype=np.int64)
    for t in range(m):
        code = code * int(arities[t]) + rows[:, t]
    return code


def contingency(data, x, y, z=()):
    """Joint counts of variables x and y for each observed configuration of z.

    counts[i, j, k] is the number of rows with X=i, Y=j and the k-th observed
    Z-configuration; strata with zero total count are not indexed.
    """
    z = tuple(z)
    if x == y or x in z or y in z:
        raise ValueError("x, y and z must be distinct")
    r = data.arity(x)
    c = data.arity(y)
    if z:
        zcols = data.rows[:, list(z)]
        zarities = [data.arity(v) for v in z]
        codes, l = observed_config_codes(zcols, zarities)
    else:
        codes = np.zeros(data.n, dtype=np.int64)
        l = 1
    flat = (data.rows[:, x].astype(np.int64) * c + data.rows[:, y]) * l + codes
    counts = np.bincount(flat, minlength=r * c * l).reshape(r, c, l)
    return ContingencyTable(r=r, c=c, l=l, counts=counts, n=data.n)


def kfold(n, k, seed):
    """Assign n rows to k folds of near-equal size, deterministically per seed."""
    if k < 2:
        raise ValueError("k must be at least 2")
    if k > n:
        raise ValueError(f"k={k} exceeds the number of rows n={n}")
    perm = np.random.default_rng(seed).permutation(n)
    fold_of_row = np.empty(n, dtype=np.int32)
    base, rem = divmod(n, k)
    start = 0
    for f in range(k):
        size = base + (1 if f < rem else 0)
        fold_of_row[perm[start:start + size]] = f
        start += size
    return FoldAssignment(fold_of_row=fold_of_row, k=k)


def binarize_continuous(values):
    """Median-split a numeric column into {0, 1}; ties go low (v <= median -> 0)."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise DataError("binarize expects a nonempty 1-d column")
    if np.all(arr == arr[0]):
        raise DataError("constant column cannot be binarized")
    med = float(np.median(arr))
    out = (arr > med).astype(np.int32)
    if out.min() == out.max():
        raise DataError("median split produced a constant column")
    return out


def load_csv(path, delimiter=",", header=True):
    """Load a delimited text file into a CategoricalDataset.

    Tokens are mapped to level indices in first-appearance order, per column.
    Constant columns, ragged rows, empty files and empty tokens are errors.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        physical = list(csv.reader(fh, delimiter=delimiter))
    if not physical:
        raise DataError(f"empty file: {path}")
    if header:
        names = [t.strip() for t in physical[0]]
        body = physical[1:]
        first_line = 2
    else:
        names = [f"v{i}" for i in range(len(physical[0]))]
        body = physical
        first_line = 1
    d = len(names)
    if not body:
        raise DataError(f"no data rows in {path}")
    tokens = [[] for _ in range(d)]
    index = [{} for _ in range(d)]
    rows = np.empty((len(body), d), dtype=np.int32)
    for rix, row in enumerate(body):
        if len(row) != d:
            raise DataError(
                f"ragged row {rix + first_line}: expected {d} fields, got {len(row)}"
            )
        for cix, raw in enumerate(row):
            tok = raw.strip()
            if tok == "":
                raise DataError(
                    f"missing value at row {rix + first_line}, column {names[cix]!r}"
                )
            level = index[cix].get(tok)
            if level is None:
                level = len(tokens[cix])
                index[cix][tok] = level
                tokens[cix].append(tok)
            rows[rix, cix] = level
    for cix in range(d):
        if len(tokens[cix]) < 2:
            raise DataError(f"constant column {names[cix]!r}")
    return CategoricalDataset(tuple(names), tuple(tuple(t) for t in tokens), rows)


def write_csv(data, path, delimiter=","):
    """Write a dataset back to disk using its original tokens."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, delimiter=delimiter, lineterminator="\n")
        writer.writerow(data.names)
        for row in data.rows:
            writer.writerow([data.levels[i][v] for i, v in enumerate(row)])


def parse_numeric_column(data, col):
    """Original tokens of one column as floats (for median binarization)."""
    try:
        lut = np.array([float(t) for t in data.levels[col]], dtype=float)
    except ValueError:
        raise DataError(
            f"column {data.names[col]!r} is not numeric and cannot be binarized"
        ) from None
    return lut[data.rows[:, col]]

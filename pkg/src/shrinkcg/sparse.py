"""Doubly-sparse CSR storage, counted matrix-vector kernels and Matrix Market I/O."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "OpCounter",
    "CsrMatrix",
    "csr_from_triplets",
    "csr_from_dense",
    "matvec",
    "matvec_transpose",
    "dot",
    "norm2",
    "norm_inf",
    "axpy",
    "as_vector",
    "read_matrix_market",
    "write_matrix_market",
]


@dataclass
class OpCounter:
    """Per-run accumulator of sparse products and multiply-adds."""

    matvecs: int = 0
    madds: int = 0

    def add(self, nnz: int) -> None:
        self.matvecs += 1
        self.madds += int(nnz)


@dataclass(frozen=True, eq=False)
class CsrMatrix:
    """Compressed sparse row matrix with cached per-row/per-column nnz maxima.

    Instances are immutable after construction. ``row_nnz_max`` and
    ``col_nnz_max`` carry the sparsity level ``s`` of a doubly-sparse matrix.
    """

    n_rows: int
    n_cols: int
    row_ptr: np.ndarray
    col_idx: np.ndarray
    values: np.ndarray
    row_nnz_max: int = field(init=False)
    col_nnz_max: int = field(init=False)
    # row index of every stored entry, used by the scatter kernels
    _row_of: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        row_ptr = np.ascontiguousarray(self.row_ptr, dtype=np.int64)
        col_idx = np.ascontiguousarray(self.col_idx, dtype=np.int64)
        values = np.ascontiguousarray(self.values, dtype=np.float64)
        if self.n_rows < 0 or self.n_cols < 0:
            raise ValueError("matrix dimensions must be non-negative")
        if row_ptr.shape != (self.n_rows + 1,):
            raise ValueError("row_ptr must have length n_rows + 1")
        if row_ptr[0] != 0 or np.any(np.diff(row_ptr) < 0):
            raise ValueError("row_ptr must start at 0 and be non-decreasing")
        nnz = int(row_ptr[-1])
        if col_idx.shape != (nnz,) or values.shape != (nnz,):
            raise ValueError("col_idx and values must have length row_ptr[-1]")
        if nnz and (col_idx.min() < 0 or col_idx.max() >= self.n_cols):
            raise ValueError("column index out of range")
        row_counts = np.diff(row_ptr)
        row_of = np.repeat(np.arange(self.n_rows, dtype=np.int64), row_counts)
        if nnz > 1:
            same_row = row_of[1:] == row_of[:-1]
            if np.any(col_idx[1:][same_row] <= col_idx[:-1][same_row]):
                raise ValueError("column indices must be strictly increasing within a row")
        if not np.all(np.isfinite(values)):
            raise ValueError("matrix values must be finite")
        for arr in (row_ptr, col_idx, values, row_of):
            arr.setflags(write=False)
        object.__setattr__(self, "row_ptr", row_ptr)
        object.__setattr__(self, "col_idx", col_idx)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "_row_of", row_of)
        object.__setattr__(self, "row_nnz_max", int(row_counts.max()) if self.n_rows else 0)
        col_counts = np.bincount(col_idx, minlength=self.n_cols)
        object.__setattr__(self, "col_nnz_max", int(col_counts.max()) if self.n_cols else 0)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_rows, self.n_cols)

    @property
    def nnz(self) -> int:
        return int(self.row_ptr[-1])

    def entries(self):
        """Iterate over stored ``(row, col, value)`` triplets in row-major order."""
        for r, c, v in zip(self._row_of.tolist(), self.col_idx.tolist(), self.values.tolist()):
            yield r, c, v

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.shape)
        out[self._row_of, self.col_idx] = self.values
        return out

    def matvec(self, x, counter: OpCounter | None = None) -> np.ndarray:
        return matvec(self, x, counter)

    def rmatvec(self, v, counter: OpCounter | None = None) -> np.ndarray:
        return matvec_transpose(self, v, counter)


def csr_from_triplets(entries, n_rows: int, n_cols: int) -> CsrMatrix:
    """Build a CSR matrix from ``(row, col, value)`` triplets.

    Duplicate positions are summed; entries whose sum is exactly ``0.0`` are
    dropped (no tolerance-based pruning).
    """
    entries = list(entries)
    if entries:
        rows = np.array([e[0] for e in entries], dtype=np.int64)
        cols = np.array([e[1] for e in entries], dtype=np.int64)
        vals = np.array([e[2] for e in entries], dtype=np.float64)
    else:
        rows = cols = np.zeros(0, dtype=np.int64)
        vals = np.zeros(0)
    if rows.size and (rows.min() < 0 or rows.max() >= n_rows):
        raise ValueError("row index out of range")
    if cols.size and (cols.min() < 0 or cols.max() >= n_cols):
        raise ValueError("column index out of range")

    key = rows * max(n_cols, 1) + cols
    uniq, inverse = np.unique(key, return_inverse=True)
    summed = np.zeros(uniq.size)
    # np.add.at accumulates in input order, keeping summation deterministic
    np.add.at(summed, inverse, vals)
    keep = summed != 0.0
    uniq, summed = uniq[keep], summed[keep]
    r = uniq // max(n_cols, 1)
    c = uniq % max(n_cols, 1)
    row_ptr = np.zeros(n_rows + 1, dtype=np.int64)
    np.cumsum(np.bincount(r, minlength=n_rows), out=row_ptr[1:])
    return CsrMatrix(n_rows, n_cols, row_ptr, c, summed)


def csr_from_dense(a) -> CsrMatrix:
    a = np.asarray(a, dtype=np.float64)
    r, c = np.nonzero(a)
    return csr_from_triplets(zip(r.tolist(), c.tolist(), a[r, c].tolist()), *a.shape)


def as_vector(x, n: int | None = None, name: str = "x") -> np.ndarray:
    """Validate a dense vector: 1-D, finite, optionally of length ``n``."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    if n is not None and x.shape[0] != n:
        raise ValueError(f"{name} has length {x.shape[0]}, expected {n}")
    if not np.all(np.isfinite(x)):
        raise ValueError(f"{name} contains non-finite entries")
    return x


def matvec(A: CsrMatrix, x, counter: OpCounter | None = None) -> np.ndarray:
    """Return ``A @ x`` using exactly ``nnz(A)`` multiply-adds."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (A.n_cols,):
        raise ValueError(f"length mismatch: matrix has {A.n_cols} columns, vector {x.shape}")
    if counter is not None:
        counter.add(A.nnz)
    return np.bincount(A._row_of, weights=A.values * x[A.col_idx], minlength=A.n_rows)


def matvec_transpose(A: CsrMatrix, v, counter: OpCounter | None = None) -> np.ndarray:
    """Return ``A.T @ v`` by row-major scatter, O(nnz)."""
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (A.n_rows,):
        raise ValueError(f"length mismatch: matrix has {A.n_rows} rows, vector {v.shape}")
    if counter is not None:
        counter.add(A.nnz)
    return np.bincount(A.col_idx, weights=A.values * v[A._row_of], minlength=A.n_cols)


def _check_pair(x, y):
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise ValueError(f"length mismatch: {x.shape} vs {y.shape}")
    return x, y


def dot(x, y) -> float:
    x, y = _check_pair(x, y)
    return float(np.dot(x, y))


def norm2(x) -> float:
    return float(np.linalg.norm(np.asarray(x, dtype=np.float64)))


def norm_inf(x) -> float:
    x = np.asarray(x, dtype=np.float64)
    return float(np.max(np.abs(x))) if x.size else 0.0


def axpy(alpha: float, x, y) -> np.ndarray:
    """``alpha * x + y`` into a single new array."""
    x, y = _check_pair(x, y)
    out = np.multiply(alpha, x)
    out += y
    return out


# Matrix Market -------------------------------------------------------------

def read_matrix_market(path) -> CsrMatrix:
    """Read a ``coordinate real`` Matrix Market file (1-based on disk)."""
    import scipy.io

    m = scipy.io.mmread(str(path))
    if not hasattr(m, "tocoo"):
        raise ValueError(f"{path}: expected a coordinate (sparse) matrix")
    coo = m.tocoo()
    return csr_from_triplets(
        zip(coo.row.tolist(), coo.col.tolist(), np.asarray(coo.data, dtype=float).tolist()),
        *coo.shape,
    )


def write_matrix_market(path, A: CsrMatrix, comment: str = "") -> None:
    """Write ``A`` as ``%%MatrixMarket matrix coordinate real general``."""
    with open(path, "w") as fh:
        fh.write("%%MatrixMarket matrix coordinate real general\n")
        for line in comment.splitlines():
            fh.write(f"% {line}\n")
        fh.write(f"{A.n_rows} {A.n_cols} {A.nnz}\n")
        for r, c, v in A.entries():
            fh.write(f"{r + 1} {c + 1} {v!r}\n")

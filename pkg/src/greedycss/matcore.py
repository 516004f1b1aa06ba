"""Column-major matrix storage, norms, normalization and file IO.

Two on-disk formats are supported:

* dense CSV: comma separated, one matrix row per line, no header;
* MatrixMarket ``coordinate real general`` with 1-based indices.
"""
from __future__ import annotations

import math
import os
import tempfile
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np
import scipy.sparse as sp

from .errors import DegenerateColumnError, MatrixFormatError

ColumnSet = tuple  # ordered tuple of distinct column indices

_MM_BANNER = "%%matrixmarket matrix coordinate real general"


@dataclass(frozen=True, eq=False)
class ColumnMatrix:
    """Immutable matrix stored either as a Fortran-ordered float64 array or CSC."""

    data: Union[np.ndarray, sp.csc_matrix]

    def __post_init__(self):
        d = self.data
        if sp.issparse(d):
            d = sp.csc_matrix(d, dtype=np.float64, copy=True)
            d.sum_duplicates()
            d.eliminate_zeros()
            d.sort_indices()
            values = d.data
        else:
            d = np.array(d, dtype=np.float64, order="F", copy=True)
            if d.ndim == 1:
                d = d.reshape(-1, 1, order="F")
            if d.ndim != 2:
                raise ValueError(f"expected a 2-d array, got shape {d.shape}")
            values = d
        if d.shape[0] < 1 or d.shape[1] < 1:
            raise ValueError(f"empty matrix of shape {d.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("matrix contains non-finite values")
        if not sp.issparse(d):
            d.setflags(write=False)
        object.__setattr__(self, "data", d)

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self):
        return self.data.shape

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self.data)

    def column(self, j: int) -> np.ndarray:
        if not 0 <= j < self.cols:
            raise IndexError(f"column {j} out of range for {self.cols} columns")
        if self.is_sparse:
            return self.data[:, [j]].toarray().ravel()
        return np.array(self.data[:, j])

    def to_dense(self) -> np.ndarray:
        if self.is_sparse:
            return np.asfortranarray(self.data.toarray())
        return np.array(self.data, order="F")

    def column_norms_sq(self) -> np.ndarray:
        if self.is_sparse:
            return np.asarray(self.data.multiply(self.data).sum(axis=0)).ravel()
        return np.einsum("ij,ij->j", self.data, self.data)


def as_dense(M) -> np.ndarray:
    """Float64 dense view of a ColumnMatrix, sparse matrix or array-like."""
    if isinstance(M, ColumnMatrix):
        return M.to_dense()
    if sp.issparse(M):
        return np.asarray(M.toarray(), dtype=np.float64)
    a = np.asarray(M, dtype=np.float64)
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    return a


def as_column_set(indices: Iterable[int], cols: int) -> ColumnSet:
    out = tuple(int(i) for i in indices)
    if len(set(out)) != len(out):
        raise ValueError(f"duplicate indices in column set {out}")
    for i in out:
        if not 0 <= i < cols:
            raise IndexError(f"column index {i} out of range for {cols} columns")
    return out


def frobenius_sq(M) -> float:
    if isinstance(M, ColumnMatrix) and M.is_sparse:
        return float(np.dot(M.data.data, M.data.data))
    if sp.issparse(M):
        v = sp.csc_matrix(M).data
        return float(np.dot(v, v))
    a = as_dense(M)
    return float(np.einsum("ij,ij->", a, a))


def normalized_columns(M, S: Sequence[int]) -> list:
    """Unit-norm copies of the columns of ``M`` listed in ``S``."""
    a = M if isinstance(M, ColumnMatrix) else ColumnMatrix(as_dense(M))
    out = []
    for j in as_column_set(S, a.cols):
        v = a.column(j)
        nrm = math.sqrt(float(np.dot(v, v)))
        if nrm == 0.0:
            raise DegenerateColumnError(j)
        out.append(v / nrm)
    return out


# -- IO ---------------------------------------------------------------------

def load_matrix(path, format: str = "dense-csv") -> ColumnMatrix:
    path = os.fspath(path)
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    if format in ("dense-csv", "csv"):
        return _parse_csv(text, path)
    if format in ("matrix-market", "mm", "mtx"):
        return _parse_mm(text, path)
    raise ValueError(f"unknown matrix format {format!r}")


def guess_format(path) -> str:
    ext = os.path.splitext(os.fspath(path))[1].lower()
    return "matrix-market" if ext in (".mtx", ".mm") else "dense-csv"


def _parse_float(tok, lineno, path):
    try:
        x = float(tok)
    except ValueError:
        raise MatrixFormatError(f"cannot parse {tok.strip()!r} as a number", lineno, path) from None
    if not math.isfinite(x):
        raise MatrixFormatError(f"non-finite value {tok.strip()!r}", lineno, path)
    return x


def _parse_csv(text, path=None) -> ColumnMatrix:
    rows = []
    width = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        vals = [_parse_float(tok, lineno, path) for tok in line.split(",")]
        if width is None:
            width = len(vals)
        elif len(vals) != width:
            raise MatrixFormatError(f"expected {width} fields, found {len(vals)}", lineno, path)
        rows.append(vals)
    if not rows:
        raise MatrixFormatError("empty matrix", None, path)
    return ColumnMatrix(np.array(rows, dtype=np.float64))


def _parse_mm(text, path=None) -> ColumnMatrix:
    lines = text.splitlines()
    if not lines or " ".join(lines[0].lower().split()) != _MM_BANNER:
        raise MatrixFormatError(
            "expected header '%%MatrixMarket matrix coordinate real general'", 1, path)
    shape = None
    entries = {}
    expected = 0
    for lineno, line in enumerate(lines[1:], start=2):
        s = line.strip()
        if not s or s.startswith("%"):
            continue
        toks = s.split()
        if shape is None:
            if len(toks) != 3:
                raise MatrixFormatError("size line must be 'rows cols nnz'", lineno, path)
            try:
                m, n, expected = (int(t) for t in toks)
            except ValueError:
                raise MatrixFormatError("non-integer size line", lineno, path) from None
            if m < 1 or n < 1:
                raise MatrixFormatError("empty matrix", lineno, path)
            shape = (m, n)
            continue
        if len(toks) != 3:
            raise MatrixFormatError("entry line must be 'row col value'", lineno, path)
        try:
            i, j = int(toks[0]), int(toks[1])
        except ValueError:
            raise MatrixFormatError("non-integer index", lineno, path) from None
        if not (1 <= i <= shape[0] and 1 <= j <= shape[1]):
            raise MatrixFormatError(f"index ({i}, {j}) outside {shape[0]}x{shape[1]}", lineno, path)
        if (i, j) in entries:
            raise MatrixFormatError(f"duplicate entry ({i}, {j})", lineno, path)
        entries[(i, j)] = _parse_float(toks[2], lineno, path)
    if shape is None:
        raise MatrixFormatError("missing size line", None, path)
    if len(entries) != expected:
        raise MatrixFormatError(f"expected {expected} entries, found {len(entries)}", None, path)
    if entries:
        ij = np.array(list(entries.keys()), dtype=np.int64) - 1
        v = np.array(list(entries.values()), dtype=np.float64)
    else:
        ij = np.zeros((0, 2), dtype=np.int64)
        v = np.zeros(0)
    return ColumnMatrix(sp.csc_matrix((v, (ij[:, 0], ij[:, 1])), shape=shape))


def _atomic_write(path, text):
    path = os.fspath(path)
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_matrix(M, path, format: str = "dense-csv") -> None:
    """Write ``M`` with 17 significant digits so that loading is bit-exact."""
    if format in ("dense-csv", "csv"):
        a = as_dense(M)
        text = "".join(",".join(format_float(x) for x in row) + "\n" for row in a)
    elif format in ("matrix-market", "mm", "mtx"):
        c = sp.coo_matrix(M.data if isinstance(M, ColumnMatrix) else
                          (M if sp.issparse(M) else as_dense(M)))
        c.eliminate_zeros()
        order = np.lexsort((c.row, c.col))
        out = ["%%MatrixMarket matrix coordinate real general",
               f"{c.shape[0]} {c.shape[1]} {c.nnz}"]
        out += [f"{c.row[t] + 1} {c.col[t] + 1} {format_float(c.data[t])}" for t in order]
        text = "\n".join(out) + "\n"
    else:
        raise ValueError(f"unknown matrix format {format!r}")
    _atomic_write(path, text)


def format_float(x: float) -> str:
    return format(float(x), ".17g")

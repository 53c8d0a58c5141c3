"""Exact sparse linear algebra over the rationals.

Matrices are stored as dictionaries of rows, each row a dictionary
``{column: Fraction}`` holding only nonzero entries.  Every routine here
is exact; there is no floating point path.

Elimination pivots deterministically: columns are scanned left to right
and the pivot row is the remaining row with the smallest index.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence

__all__ = [
    "QMatrix",
    "NoSolution",
    "NotInSpan",
    "as_vector",
    "rref",
    "rank",
    "kernel_basis",
    "solve",
    "coordinates_in_span",
    "inverse",
    "left_inverse",
    "is_invertible",
]

Vector = tuple  # tuple of Fraction


class NoSolution(ArithmeticError):
    """Raised when a linear system has no exact solution."""


class NotInSpan(NoSolution):
    """Raised when a vector is not in the span of a given family."""


def _q(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    return Fraction(x)


def as_vector(v: Iterable) -> Vector:
    return tuple(_q(x) for x in v)


class QMatrix:
    """Immutable sparse matrix with Fraction entries."""

    __slots__ = ("nrows", "ncols", "_rows")

    def __init__(self, nrows: int, ncols: int, entries=None):
        if nrows < 0 or ncols < 0:
            raise ValueError("negative matrix dimension")
        self.nrows = nrows
        self.ncols = ncols
        rows: dict[int, dict[int, Fraction]] = {}
        if entries is not None:
            items = entries.items() if isinstance(entries, Mapping) else (
                ((r, c), v) for r, c, v in entries)
            for (r, c), v in items:
                if not (0 <= r < nrows and 0 <= c < ncols):
                    raise IndexError(f"entry ({r}, {c}) outside {nrows}x{ncols}")
                v = _q(v)
                if v == 0:
                    continue
                row = rows.setdefault(r, {})
                if c in row:
                    raise ValueError(f"duplicate entry ({r}, {c})")
                row[c] = v
        self._rows = rows

    @classmethod
    def _from_rows(cls, nrows, ncols, rows):
        m = cls.__new__(cls)
        m.nrows = nrows
        m.ncols = ncols
        m._rows = {r: row for r, row in rows.items() if row}
        return m

    # construction helpers

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "QMatrix":
        return cls(nrows, ncols)

    @classmethod
    def identity(cls, n: int) -> "QMatrix":
        return cls._from_rows(n, n, {i: {i: Fraction(1)} for i in range(n)})

    @classmethod
    def from_dense(cls, rows: Sequence[Sequence], ncols: int | None = None) -> "QMatrix":
        rows = list(rows)
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        data = {}
        for i, row in enumerate(rows):
            if len(row) != ncols:
                raise ValueError("ragged dense matrix")
            r = {j: _q(x) for j, x in enumerate(row) if x != 0}
            if r:
                data[i] = r
        return cls._from_rows(len(rows), ncols, data)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], nrows: int) -> "QMatrix":
        data: dict[int, dict[int, Fraction]] = {}
        for j, col in enumerate(columns):
            if len(col) != nrows:
                raise ValueError("column length mismatch")
            for i, x in enumerate(col):
                if x != 0:
                    data.setdefault(i, {})[j] = _q(x)
        return cls._from_rows(nrows, len(columns), data)

    # access

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def __getitem__(self, key) -> Fraction:
        r, c = key
        if not (0 <= r < self.nrows and 0 <= c < self.ncols):
            raise IndexError(key)
        return self._rows.get(r, {}).get(c, Fraction(0))

    def entries(self):
        """Nonzero entries as ``(row, col, value)``, sorted by position."""
        for r in sorted(self._rows):
            row = self._rows[r]
            for c in sorted(row):
                yield r, c, row[c]

    @property
    def nnz(self) -> int:
        return sum(len(row) for row in self._rows.values())

    def row(self, i: int) -> Vector:
        row = self._rows.get(i, {})
        return tuple(row.get(j, Fraction(0)) for j in range(self.ncols))

    def column(self, j: int) -> Vector:
        return tuple(self._rows.get(i, {}).get(j, Fraction(0)) for i in range(self.nrows))

    def columns(self) -> list[Vector]:
        return [self.column(j) for j in range(self.ncols)]

    def to_dense(self) -> list[list[Fraction]]:
        return [list(self.row(i)) for i in range(self.nrows)]

    def is_zero(self) -> bool:
        return not self._rows

    # algebra

    @property
    def T(self) -> "QMatrix":
        data: dict[int, dict[int, Fraction]] = {}
        for r, row in self._rows.items():
            for c, v in row.items():
                data.setdefault(c, {})[r] = v
        return QMatrix._from_rows(self.ncols, self.nrows, data)

    def __matmul__(self, other):
        if isinstance(other, QMatrix):
            if self.ncols != other.nrows:
                raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
            data = {}
            orows = other._rows
            for r, row in self._rows.items():
                acc: dict[int, Fraction] = {}
                for k, a in row.items():
                    orow = orows.get(k)
                    if not orow:
                        continue
                    for c, b in orow.items():
                        acc[c] = acc.get(c, 0) + a * b
                acc = {c: v for c, v in acc.items() if v != 0}
                if acc:
                    data[r] = acc
            return QMatrix._from_rows(self.nrows, other.ncols, data)
        v = as_vector(other)
        if len(v) != self.ncols:
            raise ValueError(f"shape mismatch {self.shape} @ vector of length {len(v)}")
        out = [Fraction(0)] * self.nrows
        for r, row in self._rows.items():
            out[r] = sum((a * v[c] for c, a in row.items()), Fraction(0))
        return tuple(out)

    def _combine(self, other: "QMatrix", sign: int) -> "QMatrix":
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        data = {r: dict(row) for r, row in self._rows.items()}
        for r, row in other._rows.items():
            acc = data.setdefault(r, {})
            for c, v in row.items():
                s = acc.get(c, 0) + sign * v
                if s == 0:
                    acc.pop(c, None)
                else:
                    acc[c] = s
        return QMatrix._from_rows(self.nrows, self.ncols, data)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, k) -> "QMatrix":
        k = _q(k)
        if k == 0:
            return QMatrix(self.nrows, self.ncols)
        return QMatrix._from_rows(
            self.nrows, self.ncols,
            {r: {c: k * v for c, v in row.items()} for r, row in self._rows.items()})

    def __eq__(self, other):
        if not isinstance(other, QMatrix):
            return NotImplemented
        return self.shape == other.shape and self._rows == other._rows

    def __hash__(self):
        return hash((self.shape, tuple(self.entries())))

    def hstack(self, other: "QMatrix") -> "QMatrix":
        if self.nrows != other.nrows:
            raise ValueError("row count mismatch in hstack")
        data = {r: dict(row) for r, row in self._rows.items()}
        for r, row in other._rows.items():
            acc = data.setdefault(r, {})
            for c, v in row.items():
                acc[c + self.ncols] = v
        return QMatrix._from_rows(self.nrows, self.ncols + other.ncols, data)

    def vstack(self, other: "QMatrix") -> "QMatrix":
        if self.ncols != other.ncols:
            raise ValueError("column count mismatch in vstack")
        data = {r: dict(row) for r, row in self._rows.items()}
        for r, row in other._rows.items():
            data[r + self.nrows] = dict(row)
        return QMatrix._from_rows(self.nrows + other.nrows, self.ncols, data)

    def select_rows(self, idx: Sequence[int]) -> "QMatrix":
        data = {k: dict(self._rows[i]) for k, i in enumerate(idx) if i in self._rows}
        return QMatrix._from_rows(len(idx), self.ncols, data)

    def select_columns(self, idx: Sequence[int]) -> "QMatrix":
        pos = {j: k for k, j in enumerate(idx)}
        data = {}
        for r, row in self._rows.items():
            new = {pos[c]: v for c, v in row.items() if c in pos}
            if new:
                data[r] = new
        return QMatrix._from_rows(self.nrows, len(idx), data)

    def __repr__(self):
        if self.nrows * self.ncols <= 64:
            body = "; ".join(" ".join(str(x) for x in self.row(i)) for i in range(self.nrows))
            return f"QMatrix({self.nrows}x{self.ncols}: [{body}])"
        return f"QMatrix({self.nrows}x{self.ncols}, nnz={self.nnz})"


def _eliminate(rows: list[dict[int, Fraction]], ncols: int, stop: int | None = None):
    """Gauss-Jordan in place on a list of sparse rows.

    Only columns ``< stop`` are used as pivots (all columns when ``stop``
    is None).  Returns the pivot columns; the first ``len(pivots)`` rows of
    ``rows`` are the pivot rows, normalized, in pivot order.
    """
    stop = ncols if stop is None else stop
    pivots: list[int] = []
    r0 = 0
    nrows = len(rows)
    for c in range(stop):
        if r0 == nrows:
            break
        p = None
        for i in range(r0, nrows):
            if c in rows[i]:
                p = i
                break
        if p is None:
            continue
        if p != r0:
            rows[r0], rows[p] = rows[p], rows[r0]
        prow = rows[r0]
        inv = 1 / prow[c]
        if inv != 1:
            for k in prow:
                prow[k] *= inv
        for i in range(nrows):
            if i == r0:
                continue
            row = rows[i]
            f = row.get(c)
            if f is None:
                continue
            for k, v in prow.items():
                s = row.get(k, 0) - f * v
                if s == 0:
                    row.pop(k, None)
                else:
                    row[k] = s
        pivots.append(c)
        r0 += 1
    return pivots


def _row_list(M: QMatrix) -> list[dict[int, Fraction]]:
    return [dict(M._rows.get(i, {})) for i in range(M.nrows)]


def rref(M: QMatrix) -> tuple[QMatrix, list[int]]:
    """Reduced row-echelon form and the (strictly increasing) pivot columns."""
    rows = _row_list(M)
    pivots = _eliminate(rows, M.ncols)
    return QMatrix._from_rows(M.nrows, M.ncols, dict(enumerate(rows))), pivots


def rank(M: QMatrix) -> int:
    return len(rref(M)[1])


def kernel_basis(M: QMatrix) -> list[Vector]:
    """Basis of the null space, one vector per free column (in column order)."""
    R, pivots = rref(M)
    pivset = set(pivots)
    basis = []
    for f in range(M.ncols):
        if f in pivset:
            continue
        v = [Fraction(0)] * M.ncols
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            a = R._rows.get(i, {}).get(f)
            if a is not None:
                v[p] = -a
        basis.append(tuple(v))
    return basis


def solve(M: QMatrix, b: Sequence) -> Vector:
    """Some ``x`` with ``M @ x == b``; raises :class:`NoSolution` otherwise.

    Free variables are set to zero, so the answer is deterministic.
    """
    b = as_vector(b)
    if len(b) != M.nrows:
        raise ValueError(f"right-hand side has length {len(b)}, expected {M.nrows}")
    n = M.ncols
    rows = _row_list(M)
    for i, x in enumerate(b):
        if x != 0:
            rows[i][n] = x
    pivots = _eliminate(rows, n + 1, stop=n)
    for row in rows[len(pivots):]:
        if row:
            raise NoSolution("right-hand side is not in the column space")
    x = [Fraction(0)] * n
    for i, p in enumerate(pivots):
        x[p] = rows[i].get(n, Fraction(0))
    return tuple(x)


def coordinates_in_span(basis: Sequence[Sequence], v: Sequence) -> Vector:
    """Coefficients ``c`` with ``v == sum(c[i] * basis[i])``.

    ``basis`` must be linearly independent.  Raises :class:`NotInSpan`.
    """
    v = as_vector(v)
    if not basis:
        if any(v):
            raise NotInSpan("nonzero vector, empty basis")
        return ()
    for b in basis:
        if len(b) != len(v):
            raise ValueError("dimension mismatch between basis and vector")
    B = QMatrix.from_columns(basis, len(v))
    try:
        return solve(B, v)
    except NoSolution as exc:
        raise NotInSpan(str(exc)) from None


def left_inverse(M: QMatrix) -> QMatrix:
    """``L`` with ``L @ M == I`` for a matrix of full column rank."""
    m, n = M.shape
    rows = _row_list(M)
    for i in range(m):
        rows[i][n + i] = Fraction(1)
    pivots = _eliminate(rows, n + m, stop=n)
    if len(pivots) != n:
        raise ValueError("matrix does not have full column rank")
    data = {}
    for i in range(n):
        data[i] = {k - n: v for k, v in rows[i].items() if k >= n}
    return QMatrix._from_rows(n, m, data)


def is_invertible(M: QMatrix) -> bool:
    return M.nrows == M.ncols and rank(M) == M.nrows


def inverse(M: QMatrix) -> QMatrix:
    if M.nrows != M.ncols:
        raise ValueError(f"cannot invert non-square {M.shape} matrix")
    return left_inverse(M)

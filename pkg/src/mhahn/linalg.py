"""Dense square matrices over a single scalar backend.

Entry ``(i, j)`` is the coefficient of basis vector ``|i>`` in the image of
``|j>``: operators act on column vectors.
"""

from __future__ import annotations

from typing import Iterable, List, Sequence

from .scalar import Backend, BackendMismatch, Scalar, backend_of_all, format_scalar


class SingularBasis(ArithmeticError):
    pass


class Matrix:
    __slots__ = ("rows", "backend")

    def __init__(self, rows: Sequence[Sequence[Scalar]], backend: Backend):
        self.rows: List[List[Scalar]] = [list(r) for r in rows]
        n = len(self.rows)
        if any(len(r) != n for r in self.rows):
            raise ValueError("matrix must be square")
        self.backend = backend
        # plain ints are allowed in and normalized
        conv = backend.scalar
        for r in self.rows:
            for j, v in enumerate(r):
                if isinstance(v, int):
                    r[j] = conv(v)
        found = backend_of_all(v for r in self.rows for v in r)
        if found is not None and found is not backend:
            raise BackendMismatch("matrix entries do not match its backend")

    # construction -----------------------------------------------------
    @classmethod
    def zeros(cls, dim: int, backend: Backend) -> "Matrix":
        z = backend.zero()
        return cls._raw([[z] * dim for _ in range(dim)], backend)

    @classmethod
    def identity(cls, dim: int, backend: Backend) -> "Matrix":
        m = cls.zeros(dim, backend)
        for i in range(dim):
            m.rows[i][i] = backend.one()
        return m

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence[Scalar]], backend: Backend) -> "Matrix":
        n = len(cols)
        return cls([[cols[j][i] for j in range(n)] for i in range(n)], backend)

    @classmethod
    def _raw(cls, rows, backend) -> "Matrix":
        m = cls.__new__(cls)
        m.rows = rows
        m.backend = backend
        return m

    # access -----------------------------------------------------------
    @property
    def dim(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def column(self, j: int) -> List[Scalar]:
        return [r[j] for r in self.rows]

    def columns(self) -> List[List[Scalar]]:
        return [self.column(j) for j in range(self.dim)]

    def entries(self) -> Iterable[Scalar]:
        for r in self.rows:
            yield from r

    def copy(self) -> "Matrix":
        return Matrix._raw([list(r) for r in self.rows], self.backend)

    # arithmetic -------------------------------------------------------
    def _check(self, other: "Matrix"):
        if not isinstance(other, Matrix):
            raise TypeError(f"expected Matrix, got {type(other).__name__}")
        if other.backend is not self.backend:
            raise BackendMismatch("matrices from different backends")
        if other.dim != self.dim:
            raise ValueError("dimension mismatch")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        return Matrix._raw(
            [[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)],
            self.backend,
        )

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        return Matrix._raw(
            [[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)],
            self.backend,
        )

    def __neg__(self) -> "Matrix":
        return Matrix._raw([[-a for a in r] for r in self.rows], self.backend)

    def scale(self, c: Scalar) -> "Matrix":
        backend_of_all([c, self.backend.zero()])
        return Matrix._raw([[c * a for a in r] for r in self.rows], self.backend)

    def __rmul__(self, c) -> "Matrix":
        return self.scale(c)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        n = self.dim
        cols = [other.column(j) for j in range(n)]
        zero = self.backend.zero()
        out = []
        for r in self.rows:
            nz = [(k, a) for k, a in enumerate(r) if a]
            row = []
            for c in cols:
                s = zero
                for k, a in nz:
                    b = c[k]
                    if b:
                        s += a * b
                row.append(s)
            out.append(row)
        return Matrix._raw(out, self.backend)

    def apply(self, vec: Sequence[Scalar]) -> List[Scalar]:
        zero = self.backend.zero()
        out = []
        for r in self.rows:
            s = zero
            for a, b in zip(r, vec):
                if a and b:
                    s += a * b
            out.append(s)
        return out

    def plus_identity(self, c: Scalar) -> "Matrix":
        m = self.copy()
        for i in range(self.dim):
            m.rows[i][i] = m.rows[i][i] + c
        return m

    def abs(self) -> "Matrix":
        return Matrix._raw([[abs(a) for a in r] for r in self.rows], self.backend)

    @property
    def T(self) -> "Matrix":
        n = self.dim
        return Matrix._raw([[self.rows[j][i] for j in range(n)] for i in range(n)], self.backend)

    def max_abs(self):
        return max((abs(a) for a in self.entries()), default=self.backend.zero())

    def is_zero(self) -> bool:
        return all(a == 0 for a in self.entries())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.backend is other.backend and self.rows == other.rows

    __hash__ = None  # type: ignore[assignment]

    def tolist(self, fmt=format_scalar) -> List[List[str]]:
        return [[fmt(a) for a in r] for r in self.rows]

    def __repr__(self) -> str:
        body = ", ".join("[" + ", ".join(format_scalar(a) for a in r) + "]" for r in self.rows)
        return f"Matrix([{body}], {self.backend.name})"


def transpose(m: Matrix) -> Matrix:
    return m.T


def commutator(a: Matrix, b: Matrix) -> Matrix:
    return a @ b - b @ a


def anticommutator(a: Matrix, b: Matrix) -> Matrix:
    return a @ b + b @ a


def dot(u: Sequence[Scalar], v: Sequence[Scalar]):
    """Bilinear (non-conjugating) pairing."""
    s = 0
    for a, b in zip(u, v):
        if a and b:
            s = s + a * b
    return s


def triangular_kind(m: Matrix) -> str | None:
    """``"lower"``, ``"upper"``, ``"diagonal"`` or ``None``."""
    n = m.dim
    lower = all(m.rows[i][j] == 0 for i in range(n) for j in range(i + 1, n))
    upper = all(m.rows[i][j] == 0 for i in range(n) for j in range(i))
    if lower and upper:
        return "diagonal"
    if lower:
        return "lower"
    if upper:
        return "upper"
    return None


def solve_triangular(t: Matrix, rhs: Matrix) -> Matrix:
    """Return ``T^{-1} rhs`` for triangular ``T`` by substitution, column by column."""
    kind = triangular_kind(t)
    if kind is None:
        raise SingularBasis("basis matrix is not triangular")
    n = t.dim
    rows = t.rows
    for i in range(n):
        if rows[i][i] == 0:
            raise SingularBasis(f"zero pivot at {i}")
    order = range(n) if kind in ("lower", "diagonal") else range(n - 1, -1, -1)
    out_cols = []
    for j in range(n):
        b = rhs.column(j)
        x = [None] * n
        for i in order:
            s = b[i]
            r = rows[i]
            if kind == "lower":
                rng = range(i)
            elif kind == "upper":
                rng = range(i + 1, n)
            else:
                rng = ()
            for k in rng:
                if r[k]:
                    s -= r[k] * x[k]
            x[i] = s / r[i]
        out_cols.append(x)
    return Matrix._raw([[out_cols[j][i] for j in range(n)] for i in range(n)], t.backend)

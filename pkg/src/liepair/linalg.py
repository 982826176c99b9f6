"""Exact linear algebra over the rationals.

Everything here works on :class:`fractions.Fraction` entries.  Matrices are
immutable and dense; elimination internally uses sparse rows so that the
large, mostly-zero coboundary matrices of groupoid cohomology stay cheap.

Pivoting is deterministic (leftmost column, first available row), so reduced
echelon forms, kernels and particular solutions are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

Vector = tuple  # tuple of Fraction


def to_fraction(x) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        raise TypeError(f"refusing float {x!r}; pass an exact rational")
    return Fraction(x)


def format_rational(q: Fraction) -> str:
    q = to_fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def vec(values: Iterable) -> Vector:
    return tuple(to_fraction(v) for v in values)


def zero_vector(n: int) -> Vector:
    return (Fraction(0),) * n


def unit_vector(n: int, i: int) -> Vector:
    return tuple(Fraction(int(k == i)) for k in range(n))


def vadd(u: Sequence, v: Sequence) -> Vector:
    return tuple(a + b for a, b in zip(u, v, strict=True))


def vsub(u: Sequence, v: Sequence) -> Vector:
    return tuple(a - b for a, b in zip(u, v, strict=True))


def vscale(c, u: Sequence) -> Vector:
    c = to_fraction(c)
    return tuple(c * a for a in u)


def dot(u: Sequence, v: Sequence) -> Fraction:
    return sum((a * b for a, b in zip(u, v, strict=True)), Fraction(0))


def is_zero(u: Sequence) -> bool:
    return all(a == 0 for a in u)


def lincomb(coeffs: Sequence, vectors: Sequence[Sequence], n: int) -> Vector:
    out = [Fraction(0)] * n
    for c, v in zip(coeffs, vectors, strict=True):
        if c:
            for k, a in enumerate(v):
                if a:
                    out[k] += c * a
    return tuple(out)


class DimensionError(ValueError):
    pass


class Matrix:
    """Immutable dense rational matrix."""

    __slots__ = ("rows", "cols", "entries", "_hash")

    def __init__(self, entries: Iterable[Iterable], cols: int | None = None):
        data = tuple(vec(r) for r in entries)
        if cols is None:
            if not data:
                raise DimensionError("cannot infer column count of an empty matrix")
            cols = len(data[0])
        for r in data:
            if len(r) != cols:
                raise DimensionError(f"ragged row of length {len(r)}, expected {cols}")
        self.rows = len(data)
        self.cols = cols
        self.entries = data
        self._hash = None

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "Matrix":
        return cls([[0] * cols for _ in range(rows)], cols=cols)

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)], cols=n)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], rows: int) -> "Matrix":
        return cls([[c[i] for c in columns] for i in range(rows)], cols=len(columns))

    @classmethod
    def scalar(cls, c) -> "Matrix":
        return cls([[c]], cols=1)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def row(self, i: int) -> Vector:
        return self.entries[i]

    def col(self, j: int) -> Vector:
        return tuple(r[j] for r in self.entries)

    def columns(self) -> list[Vector]:
        return [self.col(j) for j in range(self.cols)]

    @property
    def T(self) -> "Matrix":
        return Matrix([self.col(j) for j in range(self.cols)], cols=self.rows)

    def apply(self, v: Sequence) -> Vector:
        if len(v) != self.cols:
            raise DimensionError(f"vector of length {len(v)} against {self.shape} matrix")
        return tuple(dot(r, v) for r in self.entries)

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            if self.cols != other.rows:
                raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
            # skip zeros on both sides: boundary matrices are very sparse
            orows = [[(j, b) for j, b in enumerate(r) if b] for r in other.entries]
            out = []
            for r in self.entries:
                acc = [Fraction(0)] * other.cols
                for k, a in enumerate(r):
                    if a:
                        for j, b in orows[k]:
                            acc[j] += a * b
                out.append(acc)
            return Matrix(out, cols=other.cols)
        return self.apply(other)

    def __add__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise DimensionError(f"cannot add {self.shape} and {other.shape}")
        return Matrix(
            [vadd(a, b) for a, b in zip(self.entries, other.entries)], cols=self.cols
        )

    def __sub__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise DimensionError(f"cannot subtract {other.shape} from {self.shape}")
        return Matrix(
            [vsub(a, b) for a, b in zip(self.entries, other.entries)], cols=self.cols
        )

    def __neg__(self) -> "Matrix":
        return self.scale(-1)

    def scale(self, c) -> "Matrix":
        return Matrix([vscale(c, r) for r in self.entries], cols=self.cols)

    def __rmul__(self, c) -> "Matrix":
        return self.scale(c)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.rows, self.cols, self.entries))
        return self._hash

    def __repr__(self) -> str:
        body = "; ".join(" ".join(format_rational(a) for a in r) for r in self.entries)
        return f"Matrix({self.rows}x{self.cols}: [{body}])"

    def is_zero(self) -> bool:
        return all(is_zero(r) for r in self.entries)

    def commutator(self, other: "Matrix") -> "Matrix":
        return self @ other - other @ self

    def kron(self, other: "Matrix") -> "Matrix":
        rows = []
        for r in self.entries:
            for s in other.entries:
                rows.append([a * b for a in r for b in s])
        return Matrix(rows, cols=self.cols * other.cols)

    def hstack(self, other: "Matrix") -> "Matrix":
        if self.rows != other.rows:
            raise DimensionError("row count mismatch in hstack")
        return Matrix(
            [a + b for a, b in zip(self.entries, other.entries)],
            cols=self.cols + other.cols,
        )

    def vstack(self, other: "Matrix") -> "Matrix":
        if self.cols != other.cols:
            raise DimensionError("column count mismatch in vstack")
        return Matrix(self.entries + other.entries, cols=self.cols)

    def trace(self) -> Fraction:
        return sum((self.entries[i][i] for i in range(min(self.shape))), Fraction(0))

    def rank(self) -> int:
        return rank(self)

    def det(self) -> Fraction:
        return determinant(self)

    def inverse(self) -> "Matrix":
        return inverse(self)

    def to_strings(self) -> list[list[str]]:
        return [[format_rational(a) for a in r] for r in self.entries]


# -- elimination ------------------------------------------------------------


def _sparse_rows(rows: Iterable[Sequence]) -> list[dict[int, Fraction]]:
    return [{j: to_fraction(a) for j, a in enumerate(r) if a} for r in rows]


def _rref_sparse(rows: list[dict[int, Fraction]], ncols: int):
    """Reduce sparse rows in place order; return (reduced rows, pivot columns).

    Leftmost column first; among candidate rows the first in input order
    is taken.  The result is the unique reduced row echelon form.
    """
    pending = [dict(r) for r in rows if r]
    basis: list[dict[int, Fraction]] = []
    pivots: list[int] = []
    # bucket rows by leading column to find pivot candidates quickly
    for col in range(ncols):
        if not pending:
            break
        chosen = None
        for idx, r in enumerate(pending):
            if r.get(col):
                chosen = idx
                break
        if chosen is None:
            continue
        prow = pending.pop(chosen)
        inv = 1 / prow[col]
        prow = {j: a * inv for j, a in prow.items()}
        survivors = []
        for r in pending:
            c = r.get(col)
            if c:
                for j, a in prow.items():
                    v = r.get(j, 0) - c * a
                    if v:
                        r[j] = v
                    else:
                        r.pop(j, None)
            if r:
                survivors.append(r)
        pending = survivors
        for r in basis:
            c = r.get(col)
            if c:
                for j, a in prow.items():
                    v = r.get(j, 0) - c * a
                    if v:
                        r[j] = v
                    else:
                        r.pop(j, None)
        basis.append(prow)
        pivots.append(col)
    return basis, pivots


def _dense(row: dict[int, Fraction], n: int) -> Vector:
    out = [Fraction(0)] * n
    for j, a in row.items():
        out[j] = a
    return tuple(out)


def rref(rows: Sequence[Sequence], ncols: int) -> tuple[list[Vector], list[int]]:
    """Reduced row echelon form of ``rows`` (zero rows dropped) and its pivots."""
    basis, pivots = _rref_sparse(_sparse_rows(rows), ncols)
    return [_dense(r, ncols) for r in basis], pivots


def rank(A: Matrix) -> int:
    # eliminate along the shorter side
    if A.rows <= A.cols:
        return len(_rref_sparse(_sparse_rows(A.entries), A.cols)[1])
    return len(_rref_sparse(_sparse_rows(A.T.entries), A.rows)[1])


def determinant(A: Matrix) -> Fraction:
    if A.rows != A.cols:
        raise DimensionError("determinant of a non-square matrix")
    m = [list(r) for r in A.entries]
    n = A.rows
    det = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if m[r][c]), None)
        if p is None:
            return Fraction(0)
        if p != c:
            m[c], m[p] = m[p], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            if m[r][c]:
                f = m[r][c] / m[c][c]
                m[r] = [a - f * b for a, b in zip(m[r], m[c])]
    return det


def inverse(A: Matrix) -> Matrix:
    if A.rows != A.cols:
        raise DimensionError("inverse of a non-square matrix")
    n = A.rows
    aug = [list(A.entries[i]) + list(unit_vector(n, i)) for i in range(n)]
    red, piv = rref(aug, 2 * n)
    if piv[:n] != list(range(n)) or len(piv) < n:
        raise ZeroDivisionError("matrix is singular")
    return Matrix([r[n:] for r in red[:n]], cols=n)


def solve(A: Matrix, b: Sequence) -> Vector | None:
    """Some ``x`` with ``A x = b``, or ``None`` when the system is inconsistent.

    Free variables are set to zero, which makes the answer unique given the
    (canonical) reduced echelon form.
    """
    if len(b) != A.rows:
        raise DimensionError(f"right-hand side has length {len(b)}, expected {A.rows}")
    n = A.cols
    aug = [list(r) + [to_fraction(bi)] for r, bi in zip(A.entries, b)]
    red, piv = _rref_sparse(_sparse_rows(aug), n + 1)
    if n in piv:
        return None
    x = [Fraction(0)] * n
    for r, p in zip(red, piv):
        x[p] = r.get(n, Fraction(0))
    return tuple(x)


def inconsistency_witness(A: Matrix, b: Sequence) -> Vector | None:
    """A row vector ``y`` with ``y A = 0`` and ``y b != 0``, if one exists.

    Such a ``y`` certifies that ``A x = b`` has no solution and can be checked
    by two dot products, independently of any elimination.
    """
    left = kernel(A.T)
    for y in left.basis:
        if dot(y, b) != 0:
            return y
    return None


# -- subspaces and quotients -------------------------------------------------


@dataclass(frozen=True)
class Subspace:
    """A subspace of Q^n stored by its reduced echelon basis."""

    ambient_dim: int
    basis: tuple[Vector, ...]
    pivots: tuple[int, ...] = field(default=(), compare=False)

    @classmethod
    def span(cls, vectors: Iterable[Sequence], ambient_dim: int) -> "Subspace":
        vs = [vec(v) for v in vectors]
        for v in vs:
            if len(v) != ambient_dim:
                raise DimensionError(f"vector of length {len(v)} in Q^{ambient_dim}")
        red, piv = rref(vs, ambient_dim)
        return cls(ambient_dim, tuple(red), tuple(piv))

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(n, (), ())

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(n, tuple(unit_vector(n, i) for i in range(n)), tuple(range(n)))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def contains(self, v: Sequence) -> bool:
        return self.coordinates(v) is not None

    def coordinates(self, v: Sequence) -> Vector | None:
        """Coordinates of ``v`` in the echelon basis, or None if ``v`` is outside."""
        v = vec(v)
        coords = tuple(v[p] for p in self.pivots)
        if lincomb(coords, self.basis, self.ambient_dim) != v:
            return None
        return coords

    def non_pivots(self) -> list[int]:
        ps = set(self.pivots)
        return [j for j in range(self.ambient_dim) if j not in ps]

    def __contains__(self, v) -> bool:
        return self.contains(v)


def echelon(vectors: Iterable[Sequence], ambient_dim: int) -> tuple[Vector, ...]:
    return Subspace.span(vectors, ambient_dim).basis


def kernel(A: Matrix) -> Subspace:
    """Null space of ``A`` with canonical echelon basis."""
    n = A.cols
    red, piv = _rref_sparse(_sparse_rows(A.entries), n)
    pset = set(piv)
    gens = []
    for f in range(n):
        if f in pset:
            continue
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for r, p in zip(red, piv):
            c = r.get(f)
            if c:
                v[p] = -c
        gens.append(v)
    return Subspace.span(gens, n)


def image(A: Matrix) -> Subspace:
    """Column space of ``A``."""
    return Subspace.span(A.columns(), A.rows)


@dataclass(frozen=True)
class QuotientSpace:
    """``Q^n / kernel`` with a chosen section.

    ``project`` maps ambient coordinates to quotient coordinates, ``section``
    lists ambient representatives of the quotient basis.
    """

    ambient_dim: int
    kernel: Subspace
    section: tuple[Vector, ...]
    project: Matrix

    @property
    def dim(self) -> int:
        return len(self.section)

    def lift(self, coords: Sequence) -> Vector:
        return lincomb(vec(coords), self.section, self.ambient_dim)

    def __call__(self, v: Sequence) -> Vector:
        return self.project.apply(vec(v))


def quotient(
    ambient_dim: int, kernel: Subspace, section: Sequence[Sequence] | None = None
) -> QuotientSpace:
    """Build the quotient by ``kernel``.

    Without an explicit ``section`` the standard basis vectors at the
    non-pivot columns of the kernel's echelon form are used.
    """
    if kernel.ambient_dim != ambient_dim:
        raise DimensionError("kernel lives in a different ambient space")
    if section is None:
        sec = tuple(unit_vector(ambient_dim, j) for j in kernel.non_pivots())
    else:
        sec = tuple(vec(s) for s in section)
        if len(sec) + kernel.dim != ambient_dim:
            raise DimensionError(
                f"section has {len(sec)} vectors, need {ambient_dim - kernel.dim}"
            )
    q = len(sec)
    if ambient_dim == 0:
        return QuotientSpace(0, kernel, (), Matrix([], cols=0))
    cols = list(sec) + list(kernel.basis)
    B = Matrix.from_columns(cols, ambient_dim)
    try:
        Binv = inverse(B)
    except ZeroDivisionError:
        raise DimensionError("section together with kernel does not span the ambient space")
    proj = Matrix(Binv.entries[:q], cols=ambient_dim) if q else Matrix([], cols=ambient_dim)
    return QuotientSpace(ambient_dim, kernel, sec, proj)


# -- tensor indexing -----------------------------------------------------------


class TensorIndex:
    """Row-major bijection between multi-indices and flat indices."""

    def __init__(self, dims: Sequence[int]):
        dims = tuple(int(d) for d in dims)
        if any(d < 0 for d in dims):
            raise ValueError(f"negative factor dimension in {dims}")
        self.dims = dims
        size = 1
        for d in dims:
            size *= d
        self.size = size

    def flat(self, multi: Sequence[int]) -> int:
        if len(multi) != len(self.dims):
            raise IndexError(f"multi-index {tuple(multi)} has wrong length for {self.dims}")
        i = 0
        for m, d in zip(multi, self.dims):
            if not 0 <= m < d:
                raise IndexError(f"index {m} out of range {d}")
            i = i * d + m
        return i

    def multi(self, flat: int) -> tuple[int, ...]:
        if not 0 <= flat < self.size:
            raise IndexError(f"flat index {flat} out of range {self.size}")
        out = []
        for d in reversed(self.dims):
            flat, m = divmod(flat, d)
            out.append(m)
        return tuple(reversed(out))

    def __len__(self) -> int:
        return self.size

    def __iter__(self):
        for i in range(self.size):
            yield self.multi(i)


def hom_index(dims: Sequence[int]) -> TensorIndex:
    return TensorIndex(dims)

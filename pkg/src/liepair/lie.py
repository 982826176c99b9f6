"""Lie algebras by structure constants, pairs, modules and the Bott module."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import combinations
from typing import Mapping, NamedTuple, Sequence

from .linalg import (
    DimensionError,
    Matrix,
    QuotientSpace,
    Subspace,
    Vector,
    inverse,
    is_zero,
    lincomb,
    quotient,
    solve,
    to_fraction,
    unit_vector,
    vadd,
    vec,
    vscale,
    zero_vector,
)


class LiePairError(ValueError):
    pass


class NotASubalgebra(LiePairError):
    def __init__(self, i: int, j: int, bracket: Vector):
        self.witness = (i, j)
        self.bracket = bracket
        super().__init__(f"[h_{i}, h_{j}] = {bracket} does not lie in the subspace")


class BadComplement(LiePairError):
    pass


class NotAModule(ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__(f"action is not a representation: {self.violations[0]}")


class Violation(NamedTuple):
    kind: str
    where: tuple
    value: object = None


@dataclass(frozen=True, eq=False)
class LieAlgebra:
    """Structure constants ``table[i][j]`` = coordinates of ``[e_i, e_j]``."""

    dim: int
    basis_names: tuple[str, ...]
    table: tuple[tuple[Vector, ...], ...]
    name: str = ""

    @classmethod
    def from_brackets(
        cls,
        dim: int,
        brackets: Mapping[tuple[int, int], Sequence | Mapping[int, object]],
        names: Sequence[str] | None = None,
        name: str = "",
    ) -> "LieAlgebra":
        """Build from the brackets ``[e_i, e_j]`` for ``i < j``; the rest is antisymmetry."""
        table = [[zero_vector(dim) for _ in range(dim)] for _ in range(dim)]
        for (i, j), value in brackets.items():
            if isinstance(value, Mapping):
                v = [Fraction(0)] * dim
                for k, c in value.items():
                    v[int(k)] = to_fraction(c)
                v = tuple(v)
            else:
                v = vec(value)
            if len(v) != dim:
                raise DimensionError(f"bracket [{i},{j}] has length {len(v)}")
            table[i][j] = v
            table[j][i] = vscale(-1, v)
        if names is None:
            names = tuple(f"e{k + 1}" for k in range(dim))
        return cls(dim, tuple(names), tuple(tuple(r) for r in table), name)

    @classmethod
    def abelian(cls, dim: int, names=None, name: str = "") -> "LieAlgebra":
        return cls.from_brackets(dim, {}, names, name or f"abelian_{dim}")

    def bracket(self, u: Sequence, v: Sequence) -> Vector:
        out = [Fraction(0)] * self.dim
        for i, a in enumerate(u):
            if not a:
                continue
            for j, b in enumerate(v):
                if not b:
                    continue
                c = a * b
                for k, t in enumerate(self.table[i][j]):
                    if t:
                        out[k] += c * t
        return tuple(out)

    def basis_vector(self, i: int) -> Vector:
        return unit_vector(self.dim, i)

    def ad(self, x: Sequence) -> Matrix:
        cols = [self.bracket(x, self.basis_vector(j)) for j in range(self.dim)]
        return Matrix.from_columns(cols, self.dim) if self.dim else Matrix([], cols=0)

    def killing_form(self) -> Matrix:
        ads = [self.ad(self.basis_vector(i)) for i in range(self.dim)]
        return Matrix(
            [[(a @ b).trace() for b in ads] for a in ads], cols=self.dim
        )

    def is_abelian(self) -> bool:
        return all(is_zero(v) for r in self.table for v in r)

    def violations(self) -> list[Violation]:
        return validate_algebra(self)

    def change_basis(self, new_basis: Sequence[Sequence], names=None) -> "LieAlgebra":
        """Same algebra, structure constants taken in ``new_basis`` (given in old coordinates)."""
        B = Matrix.from_columns([vec(b) for b in new_basis], self.dim)
        Binv = inverse(B)
        vs = B.columns()
        brackets = {}
        for i, j in combinations(range(self.dim), 2):
            brackets[(i, j)] = Binv.apply(self.bracket(vs[i], vs[j]))
        return LieAlgebra.from_brackets(
            self.dim, brackets, names or tuple(f"f{k + 1}" for k in range(self.dim)),
            self.name,
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, LieAlgebra):
            return NotImplemented
        return self.dim == other.dim and self.table == other.table

    def __hash__(self) -> int:
        return self._hash

    @cached_property
    def _hash(self) -> int:
        return hash((self.dim, self.table))

    def __repr__(self) -> str:
        return f"LieAlgebra({self.name or '?'}, dim={self.dim})"


def validate_algebra(g: LieAlgebra) -> list[Violation]:
    """Every violated antisymmetry pair or Jacobi triple; empty means valid."""
    out = []
    n = g.dim
    for i in range(n):
        for j in range(n):
            if len(g.table[i][j]) != n:
                out.append(Violation("shape", (i, j), len(g.table[i][j])))
    if out:
        return out
    for i in range(n):
        for j in range(i, n):
            if vadd(g.table[i][j], g.table[j][i]) != zero_vector(n):
                out.append(Violation("antisymmetry", (i, j), g.table[i][j]))
    e = [g.basis_vector(i) for i in range(n)]
    for i, j, k in combinations(range(n), 3):
        s = vadd(
            vadd(
                g.bracket(e[i], g.bracket(e[j], e[k])),
                g.bracket(e[j], g.bracket(e[k], e[i])),
            ),
            g.bracket(e[k], g.bracket(e[i], e[j])),
        )
        if not is_zero(s):
            out.append(Violation("jacobi", (i, j, k), s))
    return out


@dataclass(frozen=True, eq=False)
class Representation:
    """A module over ``algebra``: one ``dim x dim`` matrix per basis vector."""

    algebra: LieAlgebra
    dim: int
    action: tuple[Matrix, ...]
    name: str = ""

    def __post_init__(self):
        if len(self.action) != self.algebra.dim:
            raise DimensionError(
                f"{len(self.action)} action matrices for an algebra of dim {self.algebra.dim}"
            )
        for m in self.action:
            if m.shape != (self.dim, self.dim):
                raise DimensionError(f"action matrix of shape {m.shape}, expected {self.dim}")

    def act(self, x: Sequence) -> Matrix:
        """Action matrix of an arbitrary algebra element."""
        out = Matrix.zeros(self.dim, self.dim)
        for c, m in zip(x, self.action):
            if c:
                out = out + m.scale(c)
        return out

    def violations(self) -> list[Violation]:
        out = []
        n = self.algebra.dim
        for i, j in combinations(range(n), 2):
            lhs = self.action[i].commutator(self.action[j])
            rhs = self.act(self.algebra.table[i][j])
            if lhs != rhs:
                out.append(Violation("flatness", (i, j), lhs - rhs))
        return out

    def is_flat(self) -> bool:
        return not self.violations()

    def checked(self) -> "Representation":
        bad = self.violations()
        if bad:
            raise NotAModule(bad)
        return self


def trivial_module(h: LieAlgebra, dim: int = 1) -> Representation:
    return Representation(h, dim, tuple(Matrix.zeros(dim, dim) for _ in range(h.dim)), "trivial")


def adjoint_module(g: LieAlgebra) -> Representation:
    return Representation(g, g.dim, tuple(g.ad(g.basis_vector(i)) for i in range(g.dim)), "adjoint")


def dual(V: Representation) -> Representation:
    return Representation(V.algebra, V.dim, tuple(-m.T for m in V.action), f"dual({V.name})")


def tensor(V: Representation, W: Representation) -> Representation:
    """``V ⊗ W`` with row-major index ``(v, w)``."""
    if V.algebra != W.algebra:
        raise ValueError("tensor product of modules over different algebras")
    Iv, Iw = Matrix.identity(V.dim), Matrix.identity(W.dim)
    acts = tuple(a.kron(Iw) + Iv.kron(b) for a, b in zip(V.action, W.action))
    return Representation(V.algebra, V.dim * W.dim, acts, f"{V.name}⊗{W.name}")


def endomorphisms(E: Representation) -> Representation:
    """``End E`` indexed by ``(row, col)``; acts by commutator."""
    return tensor(E, dual(E))


def zero_module(h: LieAlgebra) -> Representation:
    return Representation(h, 0, tuple(Matrix([], cols=0) for _ in range(h.dim)), "zero")


@dataclass(frozen=True, eq=False)
class LiePair:
    """A Lie algebra ``g`` with a subalgebra ``h`` and a chosen complement.

    ``h_basis`` is kept in the order it was given; modules over ``h`` list
    their action matrices in that order.  ``quotient`` projects onto ``g/h``
    with the complement as section.
    """

    g: LieAlgebra
    h_basis: tuple[Vector, ...]
    complement: tuple[Vector, ...]
    quotient: QuotientSpace
    name: str = ""

    @property
    def h_dim(self) -> int:
        return len(self.h_basis)

    @property
    def q_dim(self) -> int:
        return len(self.complement)

    @cached_property
    def h_space(self) -> Subspace:
        return Subspace.span(self.h_basis, self.g.dim)

    def h_coordinates(self, v: Sequence) -> Vector:
        """Coordinates of ``v`` in ``h_basis``; raises if ``v`` is not in ``h``."""
        if not self.h_basis:
            if is_zero(v):
                return ()
            raise ValueError(f"{tuple(v)} is not in h")
        A = Matrix.from_columns(self.h_basis, self.g.dim)
        x = solve(A, vec(v))
        if x is None:
            raise ValueError(f"{tuple(v)} is not in h")
        return x

    def h_element(self, coords: Sequence) -> Vector:
        return lincomb(vec(coords), self.h_basis, self.g.dim)

    @cached_property
    def h(self) -> LieAlgebra:
        """The subalgebra with structure constants in ``h_basis``."""
        brackets = {}
        for i, j in combinations(range(self.h_dim), 2):
            brackets[(i, j)] = self.h_coordinates(self.g.bracket(self.h_basis[i], self.h_basis[j]))
        names = []
        for b in self.h_basis:
            nz = [k for k, c in enumerate(b) if c]
            if len(nz) == 1 and b[nz[0]] == 1:
                names.append(self.g.basis_names[nz[0]])
            else:
                names.append(f"h{len(names) + 1}")
        return LieAlgebra.from_brackets(self.h_dim, brackets, names, f"{self.name}:h")

    @cached_property
    def adapted_basis(self) -> tuple[Vector, ...]:
        """Complement vectors first, then ``h_basis``."""
        return self.complement + self.h_basis

    @cached_property
    def adapted(self) -> LieAlgebra:
        names = []
        for b in self.adapted_basis:
            nz = [k for k, c in enumerate(b) if c]
            if len(nz) == 1 and b[nz[0]] == 1:
                names.append(self.g.basis_names[nz[0]])
            else:
                names.append(f"f{len(names) + 1}")
        return self.g.change_basis(self.adapted_basis, tuple(names))

    @cached_property
    def to_adapted(self) -> Matrix:
        """Original coordinates -> adapted coordinates."""
        return inverse(Matrix.from_columns(self.adapted_basis, self.g.dim))

    def with_complement(self, complement: Sequence[Sequence]) -> "LiePair":
        return make_pair(self.g, self.h_basis, complement, self.name)

    def __repr__(self) -> str:
        return f"LiePair({self.name or self.g.name}, dim g={self.g.dim}, dim h={self.h_dim})"


def make_pair(
    g: LieAlgebra,
    h_span: Sequence[Sequence],
    complement: Sequence[Sequence] | None = None,
    name: str = "",
) -> LiePair:
    """Check ``h`` is a subalgebra and attach a complement.

    Without a complement, the standard basis vectors at the non-pivot columns
    of the echelon form of ``h`` are used.
    """
    hb = tuple(vec(v) for v in h_span)
    for v in hb:
        if len(v) != g.dim:
            raise DimensionError(f"vector {v} not in a {g.dim}-dimensional algebra")
    hs = Subspace.span(hb, g.dim)
    if hs.dim != len(hb):
        raise LiePairError("spanning vectors of h are linearly dependent")
    for i, j in combinations(range(len(hb)), 2):
        br = g.bracket(hb[i], hb[j])
        if not hs.contains(br):
            raise NotASubalgebra(i, j, br)
    if complement is None:
        comp = tuple(unit_vector(g.dim, j) for j in hs.non_pivots())
    else:
        comp = tuple(vec(v) for v in complement)
        if len(comp) + hs.dim != g.dim:
            raise BadComplement(
                f"complement has {len(comp)} vectors, need {g.dim - hs.dim}"
            )
        if Subspace.span(list(comp) + list(hb), g.dim).dim != g.dim:
            raise BadComplement("complement meets h or fails to span g together with h")
    q = quotient(g.dim, hs, comp)
    return LiePair(g, hb, comp, q, name or g.name)


@lru_cache(maxsize=256)
def bott_module(p: LiePair) -> Representation:
    """``h`` acting on ``g/h`` by ``a . l̄ = [a, l]‾`` in quotient coordinates."""
    q = p.q_dim
    acts = []
    for a in p.h_basis:
        cols = [p.quotient(p.g.bracket(a, s)) for s in p.complement]
        acts.append(Matrix.from_columns(cols, q) if q else Matrix([], cols=0))
    rep = Representation(p.h, q, tuple(acts), "g/h")
    bad = rep.violations()
    assert not bad, f"Bott action not flat: {bad[0]}"
    return rep


def change_of_section(p: LiePair, other: LiePair) -> Matrix:
    """Matrix taking ``p``-quotient coordinates to ``other``-quotient coordinates."""
    cols = [other.quotient(s) for s in p.complement]
    return Matrix.from_columns(cols, other.q_dim) if cols else Matrix([], cols=0)


# -- constructors --------------------------------------------------------------


def direct_sum(a: LieAlgebra, b: LieAlgebra, name: str = "") -> LieAlgebra:
    n = a.dim + b.dim
    brackets = {}
    for i, j in combinations(range(a.dim), 2):
        brackets[(i, j)] = a.table[i][j] + zero_vector(b.dim)
    for i, j in combinations(range(b.dim), 2):
        brackets[(a.dim + i, a.dim + j)] = zero_vector(a.dim) + b.table[i][j]
    return LieAlgebra.from_brackets(n, brackets, a.basis_names + b.basis_names, name)


def semidirect(
    acting: LieAlgebra, ideal: LieAlgebra, action: Sequence[Matrix], name: str = ""
) -> LieAlgebra:
    """``acting ⋉ ideal`` where ``action[i]`` is the derivation by the i-th basis vector.

    Raises ValueError unless the action is a representation by derivations.
    """
    action = tuple(action)
    rep = Representation(acting, ideal.dim, action)
    bad = rep.violations()
    if bad:
        raise NotAModule(bad)
    for k, D in enumerate(action):
        for i, j in combinations(range(ideal.dim), 2):
            ei, ej = ideal.basis_vector(i), ideal.basis_vector(j)
            lhs = D.apply(ideal.table[i][j])
            rhs = vadd(ideal.bracket(D.apply(ei), ej), ideal.bracket(ei, D.apply(ej)))
            if lhs != rhs:
                raise ValueError(f"action of basis vector {k} is not a derivation on ({i},{j})")
    m, n = acting.dim, ideal.dim
    brackets = {}
    for i, j in combinations(range(m), 2):
        brackets[(i, j)] = acting.table[i][j] + zero_vector(n)
    for i in range(m):
        for j in range(n):
            brackets[(i, m + j)] = zero_vector(m) + action[i].col(j)
    for i, j in combinations(range(n), 2):
        brackets[(m + i, m + j)] = zero_vector(m) + ideal.table[i][j]
    return LieAlgebra.from_brackets(m + n, brackets, acting.basis_names + ideal.basis_names, name)


@dataclass
class MatchedPairReport:
    ok: bool
    violations: list[Violation] = field(default_factory=list)
    pair: LiePair | None = None


def matched_pair_check(
    g: LieAlgebra, a_span: Sequence[Sequence], b_span: Sequence[Sequence]
) -> MatchedPairReport:
    """Both summands subalgebras and ``g = a ⊕ b`` as vector spaces."""
    out = []
    a = [vec(v) for v in a_span]
    b = [vec(v) for v in b_span]
    for label, part in (("a", a), ("b", b)):
        sp = Subspace.span(part, g.dim)
        if sp.dim != len(part):
            out.append(Violation("dependent", (label,)))
            continue
        for i, j in combinations(range(len(part)), 2):
            br = g.bracket(part[i], part[j])
            if not sp.contains(br):
                out.append(Violation("not_closed", (label, i, j), br))
    if len(a) + len(b) != g.dim:
        out.append(Violation("dimension", (len(a), len(b), g.dim)))
    elif Subspace.span(a + b, g.dim).dim != g.dim:
        out.append(Violation("not_direct", ()))
    if out:
        return MatchedPairReport(False, out)
    return MatchedPairReport(True, [], make_pair(g, a, b, g.name))


# -- standard algebras -----------------------------------------------------------


def sl2() -> LieAlgebra:
    """Basis (H, X, Y): [H,X]=2X, [H,Y]=-2Y, [X,Y]=H."""
    return LieAlgebra.from_brackets(
        3,
        {(0, 1): (0, 2, 0), (0, 2): (0, 0, -2), (1, 2): (1, 0, 0)},
        ("H", "X", "Y"),
        "sl2",
    )


def so3() -> LieAlgebra:
    """Basis (e1, e2, e3): [e1,e2]=e3 and cyclic."""
    return LieAlgebra.from_brackets(
        3,
        {(0, 1): (0, 0, 1), (1, 2): (1, 0, 0), (0, 2): (0, -1, 0)},
        ("e1", "e2", "e3"),
        "so3",
    )


def heisenberg() -> LieAlgebra:
    """Basis (x, y, z): [x,y]=z, z central."""
    return LieAlgebra.from_brackets(3, {(0, 1): (0, 0, 1)}, ("x", "y", "z"), "heisenberg")


def solvable2d() -> LieAlgebra:
    """Basis (a, b): [a,b]=b."""
    return LieAlgebra.from_brackets(2, {(0, 1): (0, 1)}, ("a", "b"), "solvable2d")

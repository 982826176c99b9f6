"""Chevalley–Eilenberg cochains ``C^k(h, V)`` for ``k = 0, 1, 2``.

Coordinates: a degree-``k`` cochain is a flat vector indexed by
``(slot, v)`` where ``slot`` runs over the increasing ``k``-tuples of ``h``
basis indices (``()`` in degree 0) and ``v`` over the basis of ``V``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Sequence

from .lie import Representation
from .linalg import (
    Matrix,
    Vector,
    format_rational,
    inconsistency_witness,
    kernel,
    rank,
    solve,
    vec,
    zero_vector,
)


def same_module(V: Representation, W: Representation) -> bool:
    return V is W or (V.dim == W.dim and V.algebra == W.algebra and V.action == W.action)


def slots(h_dim: int, k: int) -> list[tuple[int, ...]]:
    return list(combinations(range(h_dim), k))


def cochain_dim(V: Representation, k: int) -> int:
    return len(slots(V.algebra.dim, k)) * V.dim


@dataclass(frozen=True, eq=False)
class Cochain:
    degree: int
    module: Representation
    coefficients: Vector

    def __post_init__(self):
        if self.degree not in (0, 1, 2):
            raise ValueError(f"degree {self.degree} not supported")
        if len(self.coefficients) != cochain_dim(self.module, self.degree):
            raise ValueError("coefficient vector has the wrong length")

    @classmethod
    def zero(cls, module: Representation, degree: int) -> "Cochain":
        return cls(degree, module, zero_vector(cochain_dim(module, degree)))

    @classmethod
    def from_values(cls, module: Representation, values: Sequence[Sequence]) -> "Cochain":
        """Degree-1 cochain from its value on each ``h`` basis vector."""
        flat = []
        for v in values:
            flat.extend(vec(v))
        return cls(1, module, tuple(flat))

    def value(self, *slot: int) -> Vector:
        """Value on a basis slot (an increasing tuple of ``h`` indices)."""
        idx = slots(self.module.algebra.dim, self.degree).index(tuple(slot))
        m = self.module.dim
        return self.coefficients[idx * m : (idx + 1) * m]

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coefficients)

    def __add__(self, other: "Cochain") -> "Cochain":
        self._same(other)
        return Cochain(self.degree, self.module, tuple(a + b for a, b in zip(self.coefficients, other.coefficients)))

    def __sub__(self, other: "Cochain") -> "Cochain":
        self._same(other)
        return Cochain(self.degree, self.module, tuple(a - b for a, b in zip(self.coefficients, other.coefficients)))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Cochain):
            return NotImplemented
        return (
            self.degree == other.degree
            and same_module(self.module, other.module)
            and self.coefficients == other.coefficients
        )

    __hash__ = None

    def _same(self, other: "Cochain"):
        if self.degree != other.degree or not same_module(self.module, other.module):
            raise ValueError("cochains live in different spaces")

    def to_json(self) -> dict:
        m = self.module.dim
        sl = slots(self.module.algebra.dim, self.degree)
        coeffs = {}
        for i, c in enumerate(self.coefficients):
            if c:
                s, v = divmod(i, m)
                key = "(" + ",".join(map(str, sl[s])) + f")|({v})"
                coeffs[key] = format_rational(c)
        return {"degree": self.degree, "coefficients": coeffs}


def _d0_matrix(V: Representation) -> Matrix:
    # rows: (a, v); cols: v
    rows = []
    for a in range(V.algebra.dim):
        rows.extend(V.action[a].entries)
    return Matrix(rows, cols=V.dim)


def _d1_matrix(V: Representation) -> Matrix:
    """``dF(a,b) = a.F(b) - b.F(a) - F([a,b])`` for ``a < b``."""
    h = V.algebra
    p, m = h.dim, V.dim
    out_slots = slots(p, 2)
    rows = [[Fraction(0)] * (p * m) for _ in range(len(out_slots) * m)]
    for s, (a, b) in enumerate(out_slots):
        Ra, Rb = V.action[a], V.action[b]
        br = h.table[a][b]
        for r in range(m):
            row = rows[s * m + r]
            for c in range(m):
                row[b * m + c] += Ra[r, c]
                row[a * m + c] -= Rb[r, c]
            for k, coef in enumerate(br):
                if coef:
                    row[k * m + r] -= coef
    return Matrix(rows, cols=p * m)


@lru_cache(maxsize=256)
def differential_matrix(V: Representation, k: int) -> Matrix:
    """Matrix of ``d^k: C^k -> C^{k+1}``."""
    if k == 0:
        return _d0_matrix(V)
    if k == 1:
        return _d1_matrix(V)
    raise ValueError(f"differential d^{k} is not implemented (k must be 0 or 1)")


def differential(c: Cochain) -> Cochain:
    if c.degree > 1:
        raise ValueError(f"differential of a degree-{c.degree} cochain is out of range")
    D = differential_matrix(c.module, c.degree)
    return Cochain(c.degree + 1, c.module, D.apply(c.coefficients))


def h_dim(k: int, module: Representation) -> int:
    """``dim ker d^k - dim im d^{k-1}``."""
    if k not in (0, 1):
        raise ValueError("only H^0 and H^1 are computed")
    Dk = differential_matrix(module, k)
    z = Dk.cols - rank(Dk) if Dk.cols else 0
    b = rank(differential_matrix(module, k - 1)) if k > 0 and module.dim else 0
    return z - b


def solve_coboundary(F: Cochain) -> Cochain | None:
    """A degree-0 ``mu`` with ``d mu = F``, or None when ``F`` is not exact."""
    if F.degree != 1:
        raise ValueError("solve_coboundary expects a degree-1 cochain")
    V = F.module
    if V.dim == 0:
        return Cochain.zero(V, 0)
    x = solve(differential_matrix(V, 0), F.coefficients)
    return None if x is None else Cochain(0, V, x)


@dataclass(frozen=True)
class ExactnessWitness:
    """Evidence that ``d0 mu = F`` is unsolvable.

    ``functional`` annihilates every coboundary yet pairs nontrivially with
    ``F``; ``rank_d0`` and ``rank_augmented`` are the two ranks whose
    difference also shows inconsistency.
    """

    functional: Vector
    pairing: Fraction
    rank_d0: int
    rank_augmented: int

    def to_json(self) -> dict:
        return {
            "functional": [format_rational(a) for a in self.functional],
            "pairing": format_rational(self.pairing),
            "rank_d0": self.rank_d0,
            "rank_augmented": self.rank_augmented,
        }


def exactness_witness(F: Cochain) -> ExactnessWitness | None:
    V = F.module
    if V.dim == 0:
        return None
    D = differential_matrix(V, 0)
    y = inconsistency_witness(D, F.coefficients)
    if y is None:
        return None
    pairing = sum((a * b for a, b in zip(y, F.coefficients)), Fraction(0))
    aug = D.hstack(Matrix([[c] for c in F.coefficients], cols=1))
    return ExactnessWitness(y, pairing, rank(D), rank(aug))


def cocycle_basis(V: Representation) -> list[Vector]:
    return list(kernel(differential_matrix(V, 1)).basis)

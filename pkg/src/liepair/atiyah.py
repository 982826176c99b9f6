"""Connections extending an ``h``-action and the Atiyah obstruction.

For a pair ``(g, h)`` and an ``h``-module ``E``, a connection here is a
linear map ``g -> End E`` restricting to the action on ``h``.  Its Atiyah
cocycle

    r(a)(l, e) = ∇_a ∇_l e - ∇_l ∇_a e - ∇_[a,l] e

is a 1-cochain on ``h`` with values in ``W = (g/h)* ⊗ End E``.  Its class
vanishes exactly when some connection has zero cocycle.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .cohomology import (
    Cochain,
    ExactnessWitness,
    differential,
    exactness_witness,
    h_dim,
    solve_coboundary,
)
from .lie import (
    LieAlgebra,
    LiePair,
    Representation,
    bott_module,
    dual,
    endomorphisms,
    make_pair,
    tensor,
)
from .linalg import (
    DimensionError,
    Matrix,
    Subspace,
    Vector,
    hom_index,
    kernel,
    solve,
)


@dataclass(frozen=True, eq=False)
class ConnectionExtension:
    """``nabla[k]`` is ∇ of the k-th basis vector of ``g`` (original basis)."""

    pair: LiePair
    module: Representation
    nabla: tuple[Matrix, ...]

    def at(self, x: Sequence) -> Matrix:
        m = self.module.dim
        out = Matrix.zeros(m, m)
        for c, N in zip(x, self.nabla):
            if c:
                out = out + N.scale(c)
        return out

    def violations(self) -> list[tuple[int, Matrix]]:
        """``h`` basis vectors on which ∇ differs from the module action."""
        out = []
        for i, a in enumerate(self.pair.h_basis):
            if self.at(a) != self.module.action[i]:
                out.append((i, self.at(a) - self.module.action[i]))
        return out

    def on_complement(self) -> list[Matrix]:
        return [self.at(b) for b in self.pair.complement]

    def __sub__(self, other: "ConnectionExtension") -> list[Matrix]:
        return [a - b for a, b in zip(self.nabla, other.nabla)]

    def to_json(self) -> dict:
        return {
            "nabla": [N.to_strings() for N in self.nabla],
            "complement": [[str(c) for c in b] for b in self.pair.complement],
        }


def extend_action(
    pair: LiePair,
    module: Representation | None = None,
    complement_values: Sequence[Matrix] | None = None,
) -> ConnectionExtension:
    """Extend the ``h``-action to ``g``; zero on the complement unless values are given."""
    if module is None:
        module = bott_module(pair)
    if module.algebra != pair.h:
        raise DimensionError("module is not over the subalgebra of this pair")
    m = module.dim
    if complement_values is None:
        complement_values = [Matrix.zeros(m, m) for _ in pair.complement]
    complement_values = [
        v if isinstance(v, Matrix) else Matrix(v, cols=m) for v in complement_values
    ]
    if len(complement_values) != pair.q_dim:
        raise DimensionError(
            f"{len(complement_values)} complement values for {pair.q_dim} complement vectors"
        )
    for v in complement_values:
        if v.shape != (m, m):
            raise DimensionError(f"complement value of shape {v.shape}, expected ({m}, {m})")
    # ∇ on adapted basis, then pulled back to the original basis
    adapted = list(complement_values) + list(module.action)
    T = pair.to_adapted
    nabla = []
    for k in range(pair.g.dim):
        col = T.col(k)
        N = Matrix.zeros(m, m)
        for c, A in zip(col, adapted):
            if c:
                N = N + A.scale(c)
        nabla.append(N)
    return ConnectionExtension(pair, module, tuple(nabla))


def connection_from_matrices(
    pair: LiePair, module: Representation, nabla: Sequence[Matrix]
) -> ConnectionExtension:
    """Wrap a full table of ∇ on the ``g`` basis, checking it extends the action."""
    conn = ConnectionExtension(pair, module, tuple(nabla))
    if len(conn.nabla) != pair.g.dim:
        raise DimensionError("need one matrix per basis vector of g")
    bad = conn.violations()
    if bad:
        raise ValueError(f"connection does not restrict to the action on h basis vector {bad[0][0]}")
    return conn


@lru_cache(maxsize=256)
def coefficient_module(pair: LiePair, module: Representation) -> Representation:
    """``(g/h)* ⊗ End E`` indexed row-major by ``(j, r, k)``: quotient slot, output, input."""
    return tensor(dual(bott_module(pair)), endomorphisms(module))


def _pack(blocks: Sequence[Matrix]) -> list[Fraction]:
    flat = []
    for B in blocks:
        for row in B.entries:
            flat.extend(row)
    return flat


def _unpack(values: Sequence, q: int, m: int) -> list[Matrix]:
    idx = hom_index([q, m, m])
    out = []
    for j in range(q):
        out.append(Matrix(
            [[values[idx.flat((j, r, k))] for k in range(m)] for r in range(m)], cols=m
        ))
    return out


def curvature_term(conn: ConnectionExtension, a: Sequence, l: Sequence) -> Matrix:
    """``∇_a ∇_l - ∇_l ∇_a - ∇_[a,l]`` as an endomorphism of ``E``."""
    Na, Nl = conn.at(a), conn.at(l)
    return Na @ Nl - Nl @ Na - conn.at(conn.pair.g.bracket(a, l))


def atiyah_cocycle(conn: ConnectionExtension) -> Cochain:
    pair = conn.pair
    W = coefficient_module(pair, conn.module)
    values = []
    for a in pair.h_basis:
        values.append(_pack([curvature_term(conn, a, l) for l in pair.complement]))
    return Cochain.from_values(W, values)


def cocycle_blocks(c: Cochain, pair: LiePair, m: int) -> list[list[Matrix]]:
    """``blocks[i][j]`` = value on ``h_i`` at the j-th quotient basis vector (``m = dim E``)."""
    return [_unpack(c.value(i), pair.q_dim, m) for i in range(pair.h_dim)]


def is_compatible(conn: ConnectionExtension) -> bool:
    return atiyah_cocycle(conn).is_zero()


def lift_to_connection(pair: LiePair, mu: Cochain, m: int) -> list[Matrix]:
    """``mu ∘ project`` on each basis vector of ``g``: vanishes on ``h``."""
    blocks = _unpack(mu.coefficients, pair.q_dim, m)
    out = []
    for k in range(pair.g.dim):
        coords = pair.quotient.project.col(k) if pair.q_dim else ()
        N = Matrix.zeros(m, m)
        for c, B in zip(coords, blocks):
            if c:
                N = N + B.scale(c)
        out.append(N)
    return out


@dataclass
class AtiyahReport:
    pair: LiePair
    module: Representation
    connection: ConnectionExtension
    cocycle: Cochain
    vanishes: bool
    h1_dim: int
    mu: Cochain | None = None
    compatible: ConnectionExtension | None = None
    witness: ExactnessWitness | None = None
    certificates: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "vanishes": self.vanishes,
            "h1_dim": self.h1_dim,
            "cocycle": self.cocycle.to_json(),
            "mu": self.mu.to_json() if self.mu is not None else None,
            "compatible_connection": self.compatible.to_json() if self.compatible else None,
            "certificates": list(self.certificates),
            "witnesses": {"inconsistency": self.witness.to_json()} if self.witness else {},
            "coefficient_dim": self.cocycle.module.dim,
        }


def atiyah_class(
    pair: LiePair,
    module: Representation | None = None,
    conn: ConnectionExtension | None = None,
) -> AtiyahReport:
    """Decide whether the Atiyah class vanishes and, if so, build a compatible connection."""
    if module is None:
        module = conn.module if conn is not None else bott_module(pair)
    if conn is None:
        conn = extend_action(pair, module)
    else:
        bad = conn.violations()
        if bad:
            raise ValueError(f"connection does not extend the action (h basis vector {bad[0][0]})")
    R = atiyah_cocycle(conn)
    W = R.module
    assert differential(R).is_zero(), "Atiyah cocycle failed to be closed"
    h1 = h_dim(1, W)
    certs = []
    if reductive_certificate(pair) is not None:
        certs.append("reductive")
    if semisimple_certificate(pair.h):
        certs.append("semisimple")
    mu = solve_coboundary(R)
    if mu is None:
        report = AtiyahReport(pair, module, conn, R, False, h1, witness=exactness_witness(R), certificates=certs)
        assert not certs, f"certificate {certs} contradicts a nonvanishing class"
        return report
    m = module.dim
    correction = lift_to_connection(pair, mu, m)
    compatible = ConnectionExtension(
        pair, module, tuple(N - C for N, C in zip(conn.nabla, correction))
    )
    assert not compatible.violations()
    assert atiyah_cocycle(compatible).is_zero(), "corrected connection is not compatible"
    return AtiyahReport(pair, module, conn, R, True, h1, mu=mu, compatible=compatible, certificates=certs)


def compatible_connection(pair: LiePair, module: Representation | None = None) -> ConnectionExtension | None:
    rep = atiyah_class(pair, module)
    return rep.compatible


# -- sufficient conditions ---------------------------------------------------------


def reductive_certificate(pair: LiePair) -> tuple[Vector, ...] | None:
    """An ``h``-invariant complement to ``h``, or None if there is none.

    Solves for a linear map ``P: g -> h`` that is the identity on ``h`` and
    satisfies ``P ∘ ad(a) = ad_h(a) ∘ P`` for every ``a`` in ``h``; the
    kernel of ``P`` is then an invariant complement.
    """
    g, h = pair.g, pair.h
    n, p = g.dim, pair.h_dim
    if p == 0:
        return tuple(Subspace.full(n).basis)
    nvar = p * n  # P[r][c] -> r * n + c
    rows, rhs = [], []
    for i, v in enumerate(pair.h_basis):
        for r in range(p):
            row = [Fraction(0)] * nvar
            for c in range(n):
                row[r * n + c] = v[c]
            rows.append(row)
            rhs.append(Fraction(int(r == i)))
    for i, a in enumerate(pair.h_basis):
        adg = g.ad(a)
        adh = h.ad(h.basis_vector(i))
        # (P adg)[r][c] - (adh P)[r][c] = 0
        for r in range(p):
            for c in range(n):
                row = [Fraction(0)] * nvar
                for k in range(n):
                    if adg[k, c]:
                        row[r * n + k] += adg[k, c]
                for s in range(p):
                    if adh[r, s]:
                        row[s * n + c] -= adh[r, s]
                rows.append(row)
                rhs.append(Fraction(0))
    x = solve(Matrix(rows, cols=nvar), rhs)
    if x is None:
        return None
    P = Matrix([x[r * n:(r + 1) * n] for r in range(p)], cols=n)
    return kernel(P).basis


def reductive_pair(pair: LiePair) -> LiePair | None:
    """The same pair re-sectioned through an invariant complement, if one exists."""
    C = reductive_certificate(pair)
    if C is None:
        return None
    return make_pair(pair.g, pair.h_basis, C, pair.name)


def semisimple_certificate(h: LieAlgebra) -> bool:
    """Nondegenerate Killing form."""
    return h.killing_form().det() != 0

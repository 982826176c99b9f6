"""The connection-dependent PBW map ``S(g/h) -> U(g)/U(g)h``, degree by degree.

Given an extension ∇ of the Bott action, monomials are sent through

    pbw(1) = [1],  pbw(ξ) = [j ξ],
    pbw(ξ1…ξn) = 1/n Σ_k ( j(ξk) · pbw(ξ1…ξ̂k…ξn) - pbw(D_ξk(ξ1…ξ̂k…ξn)) )

with ``D_ξ`` the derivation of ``S(g/h)`` extending ``η ↦ ∇_{j ξ} η``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .atiyah import ConnectionExtension, extend_action
from .envelope import (
    QuotientClass,
    SymElement,
    Tensor2,
    derivation,
    left_multiply,
    pair_envelope,
    quotient_coproduct,
    sym_basis,
    sym_coproduct,
)
from .lie import LiePair, bott_module
from .linalg import Matrix, format_rational, rank


class SingularPbwMatrix(ArithmeticError):
    """A per-degree PBW matrix failed to be invertible."""


def _normal_basis(q: int, upto: int) -> list[tuple]:
    out = []
    for d in range(upto + 1):
        out.extend(sym_basis(q, d))
    return out


class PbwMap:
    def __init__(self, pair: LiePair, connection: ConnectionExtension, degree: int):
        self.pair = pair
        self.connection = connection
        self.degree = degree
        self._pe = pair_envelope(pair)
        q = pair.q_dim
        self._nabla = [connection.at(b) for b in pair.complement]
        self._memo: dict[tuple, QuotientClass] = {(): QuotientClass(pair, {(): Fraction(1)})}
        self.matrices: dict[int, Matrix] = {}
        for d in range(degree + 1):
            rows = _normal_basis(q, d)
            cols = sym_basis(q, d)
            images = [self.on_monomial(m) for m in cols]
            self.matrices[d] = Matrix(
                [[img.terms.get(r, Fraction(0)) for img in images] for r in rows],
                cols=len(cols),
            )

    def on_monomial(self, m: tuple) -> QuotientClass:
        m = tuple(sorted(m))
        hit = self._memo.get(m)
        if hit is not None:
            return hit
        n = len(m)
        acc = QuotientClass(self.pair, {})
        for pos, k in enumerate(m):
            rest = m[:pos] + m[pos + 1:]
            acc = acc + self._pe.left_multiply_generator(k, self.on_monomial(rest))
            D = derivation(SymElement(self.pair, {rest: 1}), self._nabla[k])
            acc = acc - self(D)
        out = acc.scale(Fraction(1, n))
        self._memo[m] = out
        return out

    def __call__(self, s: SymElement) -> QuotientClass:
        out = QuotientClass(self.pair, {})
        for m, c in s.terms.items():
            out = out + self.on_monomial(m).scale(c)
        return out

    def filtered_matrix(self) -> Matrix:
        """Square matrix of pbw on all of ``S^{≤N}``; rows and columns both in degree-then-lex order."""
        q = self.pair.q_dim
        basis = _normal_basis(q, self.degree)
        images = [self.on_monomial(m) for m in basis]
        return Matrix(
            [[img.terms.get(r, Fraction(0)) for img in images] for r in basis],
            cols=len(basis),
        )

    def symbol_defects(self) -> list[tuple]:
        """Monomials whose top-degree image is not the matching normal monomial."""
        bad = []
        for d in range(self.degree + 1):
            for m in sym_basis(self.pair.q_dim, d):
                if self.on_monomial(m).top(d) != {m: Fraction(1)}:
                    bad.append(m)
        return bad

    def is_filtered(self) -> bool:
        return all(
            self.on_monomial(m).degree() <= d
            for d in range(self.degree + 1)
            for m in sym_basis(self.pair.q_dim, d)
        )

    def to_json(self) -> dict:
        names = self.pair.g.basis_names
        return {
            "degree": self.degree,
            "complement": [[format_rational(c) for c in b] for b in self.pair.complement],
            "row_order": "normal monomials over complement indices, by degree then lexicographic",
            "column_order": "multisets over quotient indices, lexicographic",
            "matrices": {
                str(d): {
                    "rows": [list(m) for m in _normal_basis(self.pair.q_dim, d)],
                    "cols": [list(m) for m in sym_basis(self.pair.q_dim, d)],
                    "entries": M.to_strings(),
                }
                for d, M in self.matrices.items()
            },
            "algebra_basis": list(names),
        }


def pbw_build(pair: LiePair, conn: ConnectionExtension | None = None, degree: int = 4) -> PbwMap:
    """Build and check the PBW map through ``degree``.

    Raises SingularPbwMatrix if the filtered matrix is singular or the
    symbol is not the identity.
    """
    if degree < 1:
        raise ValueError("degree must be at least 1")
    bott = bott_module(pair)
    if conn is None:
        conn = extend_action(pair, bott)
    if conn.module.dim != bott.dim or tuple(conn.module.action) != tuple(bott.action):
        raise ValueError("connection must extend the Bott action")
    bad = conn.violations()
    if bad:
        raise ValueError(f"connection does not extend the Bott action (h basis vector {bad[0][0]})")
    pm = PbwMap(pair, conn, degree)
    if not pm.is_filtered() or pm.symbol_defects():
        raise SingularPbwMatrix("PBW map is not filtered with identity symbol")
    F = pm.filtered_matrix()
    if rank(F) != F.rows:
        raise SingularPbwMatrix("filtered PBW matrix is singular")
    return pm


# -- verifiers -----------------------------------------------------------------------


def _pbw_tensor(pm: PbwMap, t: Tensor2) -> Tensor2:
    out = Tensor2({})
    for (a, b), c in t.terms.items():
        A, B = pm.on_monomial(a), pm.on_monomial(b)
        out = out + Tensor2({(x, y): c * u * v for x, u in A.terms.items() for y, v in B.terms.items()})
    return out


@dataclass
class CoalgebraReport:
    ok: bool
    degree: int
    checked: int
    first_failure: dict | None = None

    def to_json(self) -> dict:
        return {"ok": self.ok, "degree": self.degree, "checked": self.checked, "first_failure": self.first_failure}


def check_coalgebra(pm: PbwMap) -> CoalgebraReport:
    """``Δ̄ ∘ pbw = (pbw ⊗ pbw) ∘ Δ_S`` on every basis monomial of degree ≤ N."""
    checked = 0
    for d in range(pm.degree + 1):
        for m in sym_basis(pm.pair.q_dim, d):
            s = SymElement(pm.pair, {m: 1})
            lhs = quotient_coproduct(pm(s))
            rhs = _pbw_tensor(pm, sym_coproduct(s))
            checked += 1
            if lhs != rhs:
                return CoalgebraReport(False, pm.degree, checked, {
                    "monomial": list(m), "lhs": repr(lhs), "rhs": repr(rhs),
                })
    return CoalgebraReport(True, pm.degree, checked)


@dataclass
class EquivarianceReport:
    ok: bool
    degree: int
    checked: int
    failures: list[dict] = field(default_factory=list)

    @property
    def first_failing_degree(self) -> int | None:
        return min((f["degree"] for f in self.failures), default=None)

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "degree": self.degree,
            "checked": self.checked,
            "first_failing_degree": self.first_failing_degree,
            "failures": self.failures,
        }


def check_equivariance(pm: PbwMap) -> EquivarianceReport:
    """``pbw(a·s) = L_a pbw(s)`` for each ``h`` basis vector ``a`` and basis monomial ``s``."""
    pair = pm.pair
    bott = bott_module(pair)
    failures = []
    checked = 0
    for i, a in enumerate(pair.h_basis):
        for d in range(pm.degree + 1):
            for m in sym_basis(pair.q_dim, d):
                s = SymElement(pair, {m: 1})
                lhs = pm(derivation(s, bott.action[i]))
                rhs = left_multiply(a, pm(s))
                checked += 1
                if lhs != rhs:
                    failures.append({
                        "h_index": i, "degree": d, "monomial": list(m),
                        "pbw(a.s)": repr(lhs), "L_a pbw(s)": repr(rhs),
                    })
    return EquivarianceReport(not failures, pm.degree, checked, failures)

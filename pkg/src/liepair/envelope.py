"""Universal enveloping algebras in PBW normal form and the quotient ``U(g)/U(g)h``.

Elements are sparse maps from weakly increasing index tuples (PBW monomials)
to rationals.  Products are straightened by repeatedly rewriting
``e_j e_i -> e_i e_j + [e_j, e_i]`` at the leftmost descent.

For a pair, the enveloping algebra is taken in the adapted basis
(complement first, then ``h``).  A PBW monomial then lies in ``U(g)h`` as
soon as it contains an ``h`` letter, so the quotient keeps exactly the
monomials written in complement letters.
"""

from __future__ import annotations

from collections import Counter
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement, permutations
from math import comb, factorial
from typing import Mapping, Sequence

from .lie import LieAlgebra, LiePair
from .linalg import to_fraction, vec

Monomial = tuple  # weakly increasing tuple of basis indices


def _add_into(acc: dict, key, c) -> None:
    v = acc.get(key, 0) + c
    if v:
        acc[key] = v
    else:
        acc.pop(key, None)


def _clean(terms: Mapping) -> dict:
    return {k: to_fraction(v) for k, v in terms.items() if v}


class Envelope:
    """``U(g)`` with a memoised straightening table."""

    def __init__(self, g: LieAlgebra):
        self.g = g
        self._nf: dict[tuple, dict] = {}

    def normal_form(self, word: Sequence[int]) -> dict:
        word = tuple(word)
        hit = self._nf.get(word)
        if hit is not None:
            return hit
        p = next((i for i in range(len(word) - 1) if word[i] > word[i + 1]), None)
        if p is None:
            out = {word: Fraction(1)}
        else:
            j, i = word[p], word[p + 1]
            head, tail = word[:p], word[p + 2:]
            out = dict(self.normal_form(head + (i, j) + tail))
            for k, c in enumerate(self.g.table[j][i]):
                if c:
                    for m, d in self.normal_form(head + (k,) + tail).items():
                        _add_into(out, m, c * d)
        self._nf[word] = out
        return out

    def element(self, terms: Mapping | None = None) -> "EnvelopeElement":
        return EnvelopeElement(self, terms or {})

    def one(self) -> "EnvelopeElement":
        return EnvelopeElement(self, {(): Fraction(1)})

    def gen(self, i: int) -> "EnvelopeElement":
        return EnvelopeElement(self, {(i,): Fraction(1)})

    def from_vector(self, x: Sequence) -> "EnvelopeElement":
        return EnvelopeElement(self, {(i,): c for i, c in enumerate(vec(x)) if c})

    def word(self, letters: Sequence[int]) -> "EnvelopeElement":
        """Normal form of the product ``e_{i1} ... e_{ik}``."""
        return EnvelopeElement(self, self.normal_form(letters))

    def __repr__(self) -> str:
        return f"U({self.g.name or self.g.dim})"


@lru_cache(maxsize=64)
def envelope(g: LieAlgebra) -> Envelope:
    return Envelope(g)


class EnvelopeElement:
    __slots__ = ("U", "terms")

    def __init__(self, U: Envelope, terms: Mapping):
        self.U = U
        for m in terms:
            if any(m[i] > m[i + 1] for i in range(len(m) - 1)):
                raise ValueError(f"monomial {m} is not PBW-ordered; use Envelope.word")
        self.terms = _clean(terms)

    @property
    def algebra(self) -> LieAlgebra:
        return self.U.g

    def _check(self, other: "EnvelopeElement"):
        if self.U.g != other.U.g:
            raise ValueError("elements of different enveloping algebras")

    def __add__(self, other: "EnvelopeElement") -> "EnvelopeElement":
        self._check(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            _add_into(out, m, c)
        return EnvelopeElement(self.U, out)

    def __neg__(self) -> "EnvelopeElement":
        return EnvelopeElement(self.U, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "EnvelopeElement") -> "EnvelopeElement":
        return self + (-other)

    def scale(self, c) -> "EnvelopeElement":
        c = to_fraction(c)
        return EnvelopeElement(self.U, {m: c * v for m, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, EnvelopeElement):
            return multiply(self, other)
        return self.scale(other)

    def __rmul__(self, c):
        return self.scale(c)

    def __eq__(self, other) -> bool:
        if not isinstance(other, EnvelopeElement):
            return NotImplemented
        return self.U.g == other.U.g and self.terms == other.terms

    __hash__ = None

    def degree(self) -> int:
        return max((len(m) for m in self.terms), default=-1)

    def is_zero(self) -> bool:
        return not self.terms

    def __repr__(self) -> str:
        return _format(self.terms, self.U.g.basis_names)


def _format(terms: Mapping, names: Sequence[str]) -> str:
    if not terms:
        return "0"
    parts = []
    for m in sorted(terms, key=lambda t: (len(t), t)):
        c = terms[m]
        word = "·".join(names[i] for i in m) or "1"
        parts.append(f"{c}*{word}" if c != 1 else word)
    return " + ".join(parts)


def multiply(u: EnvelopeElement, v: EnvelopeElement) -> EnvelopeElement:
    u._check(v)
    U = u.U
    out: dict = {}
    for m1, c1 in u.terms.items():
        for m2, c2 in v.terms.items():
            for m, d in U.normal_form(m1 + m2).items():
                _add_into(out, m, c1 * c2 * d)
    return EnvelopeElement(U, out)


def counit(u: EnvelopeElement) -> Fraction:
    return u.terms.get((), Fraction(0))


def _split(m: Monomial) -> dict:
    """Deconcatenation of a monomial over all position subsets; ordered subsequences stay PBW-ordered."""
    out: dict = {}
    n = len(m)
    for mask in range(1 << n):
        left = tuple(m[i] for i in range(n) if mask >> i & 1)
        right = tuple(m[i] for i in range(n) if not mask >> i & 1)
        _add_into(out, (left, right), 1)
    return out


class Tensor2:
    """Element of ``A ⊗ A`` as a map from monomial pairs to coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping):
        self.terms = _clean(terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Tensor2):
            return NotImplemented
        return self.terms == other.terms

    __hash__ = None

    def __add__(self, other: "Tensor2") -> "Tensor2":
        out = dict(self.terms)
        for k, c in other.terms.items():
            _add_into(out, k, c)
        return Tensor2(out)

    def __sub__(self, other: "Tensor2") -> "Tensor2":
        out = dict(self.terms)
        for k, c in other.terms.items():
            _add_into(out, k, -c)
        return Tensor2(out)

    def is_zero(self) -> bool:
        return not self.terms

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(
            f"{c}*{a}⊗{b}" for (a, b), c in sorted(self.terms.items(), key=lambda t: (len(t[0][0]) + len(t[0][1]), t[0]))
        )


def coproduct(u: EnvelopeElement) -> Tensor2:
    """The coproduct with primitive generators."""
    out: dict = {}
    for m, c in u.terms.items():
        for k, d in _split(m).items():
            _add_into(out, k, c * d)
    return Tensor2(out)


def tensor_product(u: EnvelopeElement, v: EnvelopeElement) -> Tensor2:
    return Tensor2({(a, b): c * d for a, c in u.terms.items() for b, d in v.terms.items()})


# -- the quotient by U(g)h -------------------------------------------------------


class QuotientClass:
    """Element of ``U(g)/U(g)h`` in normal form: monomials in complement letters only."""

    __slots__ = ("pair", "terms")

    def __init__(self, pair: LiePair, terms: Mapping):
        q = pair.q_dim
        for m in terms:
            if any(i >= q for i in m) or any(m[i] > m[i + 1] for i in range(len(m) - 1)):
                raise ValueError(f"{m} is not a normal quotient monomial")
        self.pair = pair
        self.terms = _clean(terms)

    def __add__(self, other: "QuotientClass") -> "QuotientClass":
        out = dict(self.terms)
        for m, c in other.terms.items():
            _add_into(out, m, c)
        return QuotientClass(self.pair, out)

    def __neg__(self) -> "QuotientClass":
        return QuotientClass(self.pair, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "QuotientClass") -> "QuotientClass":
        return self + (-other)

    def scale(self, c) -> "QuotientClass":
        c = to_fraction(c)
        return QuotientClass(self.pair, {m: c * v for m, v in self.terms.items()})

    def __rmul__(self, c) -> "QuotientClass":
        return self.scale(c)

    def __eq__(self, other) -> bool:
        if not isinstance(other, QuotientClass):
            return NotImplemented
        return self.pair is other.pair and self.terms == other.terms

    __hash__ = None

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max((len(m) for m in self.terms), default=-1)

    def top(self, d: int) -> dict:
        return {m: c for m, c in self.terms.items() if len(m) == d}

    def __repr__(self) -> str:
        names = pair_envelope(self.pair).U.g.basis_names
        return "[" + _format(self.terms, names) + "]"


class PairEnvelope:
    """``U(g)`` in the adapted basis of a pair, with the quotient operations."""

    def __init__(self, pair: LiePair):
        self.pair = pair
        self.U = Envelope(pair.adapted)
        self.q = pair.q_dim
        T = pair.to_adapted
        self._gens = [
            self.U.from_vector(T.col(k)) for k in range(pair.g.dim)
        ]

    def adapted_vector(self, x: Sequence) -> tuple:
        return self.pair.to_adapted.apply(vec(x))

    def from_original(self, u: EnvelopeElement) -> EnvelopeElement:
        """Rewrite an element of ``U(g)`` (original basis) in the adapted basis."""
        if u.U.g != self.pair.g:
            raise ValueError("element is not in U(g) of this pair")
        out = self.U.element()
        for m, c in u.terms.items():
            w = self.U.one()
            for k in m:
                w = w * self._gens[k]
            out = out + w.scale(c)
        return out

    def to_adapted(self, u: EnvelopeElement) -> EnvelopeElement:
        if u.U is self.U:
            return u
        if u.U.g == self.pair.g:
            return self.from_original(u)
        if u.U.g == self.U.g:
            return EnvelopeElement(self.U, u.terms)
        raise ValueError("element is not in U(g) of this pair")

    def project(self, u: EnvelopeElement) -> QuotientClass:
        u = self.to_adapted(u)
        q = self.q
        return QuotientClass(self.pair, {m: c for m, c in u.terms.items() if all(i < q for i in m)})

    def lift(self, c: QuotientClass) -> EnvelopeElement:
        return EnvelopeElement(self.U, c.terms)

    def left_multiply_adapted(self, x: Sequence, c: QuotientClass) -> QuotientClass:
        """Class of ``x · lift(c)`` for ``x`` given in adapted coordinates."""
        return self.project(self.U.from_vector(x) * self.lift(c))

    def left_multiply_generator(self, i: int, c: QuotientClass) -> QuotientClass:
        q = self.q
        out: dict = {}
        for m, v in c.terms.items():
            for w, d in self.U.normal_form((i,) + m).items():
                if all(k < q for k in w):
                    _add_into(out, w, v * d)
        return QuotientClass(self.pair, out)

    def monomial(self, m: Monomial) -> QuotientClass:
        return QuotientClass(self.pair, {tuple(m): Fraction(1)})


@lru_cache(maxsize=64)
def pair_envelope(pair: LiePair) -> PairEnvelope:
    return PairEnvelope(pair)


def project_quotient(u: EnvelopeElement, pair: LiePair) -> QuotientClass:
    """Class of ``u`` in ``U(g)/U(g)h``; ``u`` may be over ``g`` or over the adapted basis."""
    return pair_envelope(pair).project(u)


def quotient_coproduct(c: QuotientClass) -> Tensor2:
    """Coproduct of the lift, projected on both sides (monomials stay complement-only)."""
    return coproduct(EnvelopeElement(pair_envelope(c.pair).U, c.terms))


def left_multiply(a: Sequence, c: QuotientClass) -> QuotientClass:
    """Left multiplication by ``a ∈ h`` (original coordinates of ``g``)."""
    pair = c.pair
    if not pair.h_space.contains(a):
        raise ValueError(f"{tuple(a)} is not in h")
    P = pair_envelope(pair)
    return P.left_multiply_adapted(P.adapted_vector(a), c)


# -- symmetric algebra of g/h ------------------------------------------------------


class SymElement:
    """Element of ``S(g/h)``: sorted index tuples over the quotient basis."""

    __slots__ = ("pair", "terms")

    def __init__(self, pair: LiePair, terms: Mapping):
        q = pair.q_dim
        fixed: dict = {}
        for m, c in terms.items():
            if any(i >= q or i < 0 for i in m):
                raise ValueError(f"{m} is not a multiset over the quotient basis")
            _add_into(fixed, tuple(sorted(m)), to_fraction(c))
        self.pair = pair
        self.terms = fixed

    def __add__(self, other: "SymElement") -> "SymElement":
        out = dict(self.terms)
        for m, c in other.terms.items():
            _add_into(out, m, c)
        return SymElement(self.pair, out)

    def scale(self, c) -> "SymElement":
        c = to_fraction(c)
        return SymElement(self.pair, {m: c * v for m, v in self.terms.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, SymElement):
            return NotImplemented
        return self.pair is other.pair and self.terms == other.terms

    __hash__ = None

    def is_zero(self) -> bool:
        return not self.terms

    def __repr__(self) -> str:
        names = [f"{n}̄" for n in pair_envelope(self.pair).U.g.basis_names]
        if not self.terms:
            return "0"
        return " + ".join(
            f"{c}*" + ("⊙".join(names[i] for i in m) or "1")
            for m, c in sorted(self.terms.items(), key=lambda t: (len(t[0]), t[0]))
        )


def sym_basis(q: int, d: int) -> list[Monomial]:
    """Degree-``d`` multisets over ``range(q)`` in lexicographic order."""
    return list(combinations_with_replacement(range(q), d))


def sym_coproduct(s: SymElement) -> Tensor2:
    """``ξ ↦ ξ⊗1 + 1⊗ξ`` extended multiplicatively."""
    out: dict = {}
    for m, c in s.terms.items():
        counts = Counter(m)
        keys = sorted(counts)
        def rec(idx, left, weight):
            if idx == len(keys):
                lt = tuple(sorted(left))
                rt = tuple(sorted((counts - Counter(left)).elements()))
                _add_into(out, (lt, rt), c * weight)
                return
            k = keys[idx]
            for t in range(counts[k] + 1):
                rec(idx + 1, left + [k] * t, weight * comb(counts[k], t))
        rec(0, [], 1)
    return Tensor2(out)


def derivation(s: SymElement, matrices: Sequence) -> SymElement:
    """Apply the derivation of ``S(g/h)`` extending a linear map given by ``matrices``.

    ``matrices`` is a single Matrix acting on quotient coordinates.
    """
    A = matrices
    q = s.pair.q_dim
    out: dict = {}
    for m, c in s.terms.items():
        for pos, i in enumerate(m):
            rest = m[:pos] + m[pos + 1:]
            for r in range(q):
                a = A[r, i]
                if a:
                    _add_into(out, tuple(sorted(rest + (r,))), c * a)
    return SymElement(s.pair, out)


def symmetrize(s: SymElement) -> QuotientClass:
    """``ξ1⊙…⊙ξk ↦ (1/k!) Σ_σ [j(ξσ1)…j(ξσk)]``."""
    P = pair_envelope(s.pair)
    out = QuotientClass(s.pair, {})
    for m, c in s.terms.items():
        k = len(m)
        acc: dict = {}
        for w in set(permutations(m)):
            for mono, d in P.U.normal_form(w).items():
                _add_into(acc, mono, d)
        weight = Fraction(1, factorial(k))
        for v in Counter(m).values():
            weight *= factorial(v)
        out = out + P.project(P.U.element(acc)).scale(c * weight)
    return out


def monomial_identification(s: SymElement) -> QuotientClass:
    """Send a multiset to the normal monomial with the same letters."""
    return QuotientClass(s.pair, dict(s.terms))

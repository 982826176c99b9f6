"""Finite groupoids, their modules and cohomology, and bibundles between them.

Arrows ``γ: x -> y`` have ``src(γ) = x`` and ``tgt(γ) = y``; the product
``γ1·γ2`` is defined when ``src(γ1) = tgt(γ2)``.  Labels may be any hashable
values; wherever a representative has to be picked, the smallest label under
:func:`label_key` wins.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import permutations
from typing import Callable, Hashable, Iterable, Mapping, NamedTuple, Sequence

from .linalg import Matrix, Subspace, kernel, vec


def label_key(x):
    """Total order on mixed labels: ints, then strings, then tuples, then the rest by repr."""
    if isinstance(x, bool):
        return (3, repr(x))
    if isinstance(x, int):
        return (0, x)
    if isinstance(x, str):
        return (1, x)
    if isinstance(x, tuple):
        return (2, tuple(label_key(e) for e in x))
    return (3, repr(x))


def smallest(xs: Iterable):
    return min(xs, key=label_key)


def largest(xs: Iterable):
    return max(xs, key=label_key)


class Violation(NamedTuple):
    kind: str
    witness: tuple

    def to_json(self) -> dict:
        return {"kind": self.kind, "witness": [repr(w) for w in self.witness]}


@dataclass
class ValidationReport:
    ok: bool
    violations: list[Violation]

    def to_json(self) -> dict:
        return {"ok": self.ok, "violations": [v.to_json() for v in self.violations[:50]],
                "violation_count": len(self.violations)}


class FiniteGroupoid:
    """A finite groupoid; units and inverses are inferred from the multiplication table."""

    def __init__(self, objects: Iterable, arrows: Mapping[Hashable, tuple], mult: Mapping[tuple, Hashable], name: str = ""):
        self.objects = tuple(sorted(objects, key=label_key))
        self.arrows = tuple(sorted(arrows, key=label_key))
        self.src = {a: st[0] for a, st in arrows.items()}
        self.tgt = {a: st[1] for a, st in arrows.items()}
        self.mult = dict(mult)
        self.name = name

    @classmethod
    def from_law(cls, objects, arrows: Mapping[Hashable, tuple], law: Callable, name: str = "") -> "FiniteGroupoid":
        """Build the table from a function on composable pairs."""
        src = {a: st[0] for a, st in arrows.items()}
        tgt = {a: st[1] for a, st in arrows.items()}
        mult = {(a, b): law(a, b) for a in arrows for b in arrows if src[a] == tgt[b]}
        return cls(objects, arrows, mult, name)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FiniteGroupoid):
            return NotImplemented
        return (self.objects == other.objects and self.arrows == other.arrows
                and self.src == other.src and self.tgt == other.tgt and self.mult == other.mult)

    def __hash__(self) -> int:
        return hash((self.objects, self.arrows))

    def __repr__(self) -> str:
        return f"FiniteGroupoid({self.name or '?'}: {len(self.objects)} objects, {len(self.arrows)} arrows)"

    def composable(self, a, b) -> bool:
        return self.src[a] == self.tgt[b]

    def compose(self, a, b):
        try:
            return self.mult[(a, b)]
        except KeyError:
            raise ValueError(f"arrows {a!r}, {b!r} are not composable") from None

    @cached_property
    def unit(self) -> dict:
        """Object -> identity arrow, found as the idempotent loop at each object."""
        out = {}
        for a in self.arrows:
            x = self.src[a]
            if self.tgt[a] == x and self.mult.get((a, a)) == a and x not in out:
                out[x] = a
        return out

    @cached_property
    def inverse(self) -> dict:
        out = {}
        for a in self.arrows:
            for b in self.arrows:
                if (self.src[b] == self.tgt[a] and self.tgt[b] == self.src[a]
                        and self.mult.get((a, b)) == self.unit.get(self.tgt[a])
                        and self.mult.get((b, a)) == self.unit.get(self.src[a])):
                    out[a] = b
                    break
        return out

    def hom(self, x, y) -> list:
        return [a for a in self.arrows if self.src[a] == x and self.tgt[a] == y]

    def nerve(self, n: int) -> list[tuple]:
        """Composable ``n``-tuples ``(γ1, …, γn)`` with ``src(γi) = tgt(γi+1)``; ``n = 0`` gives objects as 1-tuples."""
        if n == 0:
            return [(x,) for x in self.objects]
        out = [(a,) for a in self.arrows]
        by_tgt: dict = {}
        for a in self.arrows:
            by_tgt.setdefault(self.tgt[a], []).append(a)
        for _ in range(n - 1):
            out = [t + (b,) for t in out for b in by_tgt.get(self.src[t[-1]], [])]
        return out

    def violations(self) -> list[Violation]:
        out = []
        objs = set(self.objects)
        for a in self.arrows:
            if self.src[a] not in objs or self.tgt[a] not in objs:
                out.append(Violation("endpoint", (a,)))
        for a, b in self.nerve(2):
            c = self.mult.get((a, b))
            if c is None:
                out.append(Violation("missing product", (a, b)))
            elif c not in self.src or self.src[c] != self.src[b] or self.tgt[c] != self.tgt[a]:
                out.append(Violation("product endpoints", (a, b, c)))
        for key in self.mult:
            if not (key[0] in self.src and key[1] in self.src and self.composable(*key)):
                out.append(Violation("product of non-composable pair", key))
        if out:
            return out
        for a, b, c in self.nerve(3):
            if self.mult[(self.mult[(a, b)], c)] != self.mult[(a, self.mult[(b, c)])]:
                out.append(Violation("associativity", (a, b, c)))
        for x in self.objects:
            u = self.unit.get(x)
            if u is None:
                out.append(Violation("no unit", (x,)))
                continue
            for a in self.arrows:
                if self.tgt[a] == x and self.mult[(u, a)] != a:
                    out.append(Violation("left unit", (u, a)))
                if self.src[a] == x and self.mult[(a, u)] != a:
                    out.append(Violation("right unit", (a, u)))
        if not any(v.kind == "no unit" for v in out):
            for a in self.arrows:
                if a not in self.inverse:
                    out.append(Violation("no inverse", (a,)))
        return out

    def restrict(self, arrows: Iterable, name: str = "") -> "FiniteGroupoid":
        keep = set(arrows)
        return FiniteGroupoid(
            self.objects,
            {a: (self.src[a], self.tgt[a]) for a in keep},
            {k: v for k, v in self.mult.items() if k[0] in keep and k[1] in keep},
            name or f"{self.name}|sub",
        )

    def orbits(self) -> list[list]:
        seen, out = set(), []
        for x in self.objects:
            if x in seen:
                continue
            orb = sorted({self.tgt[a] for a in self.arrows if self.src[a] == x}, key=label_key)
            seen.update(orb)
            out.append(orb)
        return out


# -- constructors ----------------------------------------------------------------------


def pair_groupoid(objects: Sequence, name: str = "") -> FiniteGroupoid:
    """Arrow ``(y, x)`` goes from ``x`` to ``y``."""
    arrows = {(y, x): (x, y) for x in objects for y in objects}
    return FiniteGroupoid.from_law(objects, arrows, lambda a, b: (a[0], b[1]), name or f"pair{len(objects)}")


def group(elements: Sequence, op: Callable, name: str = "") -> FiniteGroupoid:
    return FiniteGroupoid.from_law(["*"], {g: ("*", "*") for g in elements}, op, name)


def cyclic(n: int) -> FiniteGroupoid:
    return group(range(n), lambda a, b: (a + b) % n, f"Z{n}")


def sym3() -> FiniteGroupoid:
    """Permutations of (0,1,2) as tuples; ``(p·q)(i) = p(q(i))``."""
    return group(list(permutations(range(3))), lambda p, q: tuple(p[q[i]] for i in range(3)), "S3")


def point() -> FiniteGroupoid:
    return group(["e"], lambda a, b: "e", "point")


def units_groupoid(objects: Sequence, name: str = "") -> FiniteGroupoid:
    """Only identities; arrow ``("1", x)``."""
    return FiniteGroupoid.from_law(
        objects, {("1", x): (x, x) for x in objects}, lambda a, b: a, name or f"units{len(objects)}"
    )


def action_groupoid(G: FiniteGroupoid, X: Sequence, act: Callable, name: str = "") -> FiniteGroupoid:
    """``G ⋉ X`` for a group ``G``: arrow ``(g, x)`` goes from ``x`` to ``act(g, x)``."""
    arrows = {(g, x): (x, act(g, x)) for g in G.arrows for x in X}
    return FiniteGroupoid.from_law(
        X, arrows, lambda a, b: (G.compose(a[0], b[0]), b[1]), name or f"{G.name}⋉X"
    )


def disjoint_union(A: FiniteGroupoid, B: FiniteGroupoid, name: str = "") -> FiniteGroupoid:
    """Labels are tagged ``(0, ·)`` and ``(1, ·)``."""
    objects = [(0, x) for x in A.objects] + [(1, x) for x in B.objects]
    arrows = {(0, a): ((0, A.src[a]), (0, A.tgt[a])) for a in A.arrows}
    arrows.update({(1, b): ((1, B.src[b]), (1, B.tgt[b])) for b in B.arrows})
    mult = {((0, a), (0, b)): (0, c) for (a, b), c in A.mult.items()}
    mult.update({((1, a), (1, b)): (1, c) for (a, b), c in B.mult.items()})
    return FiniteGroupoid(objects, arrows, mult, name or f"{A.name}⊔{B.name}")


# -- pairs, morphisms, modules ---------------------------------------------------------


@dataclass(eq=False)
class GroupoidPair:
    ambient: FiniteGroupoid
    sub: frozenset

    def violations(self) -> list[Violation]:
        L, A = self.ambient, self.sub
        out = [Violation("not an arrow", (a,)) for a in A if a not in L.src]
        for x, u in L.unit.items():
            if u not in A:
                out.append(Violation("not wide", (x, u)))
        for a in A:
            if a in L.inverse and L.inverse[a] not in A:
                out.append(Violation("not closed under inverse", (a,)))
            for b in A:
                if a in L.src and b in L.src and L.composable(a, b) and L.mult[(a, b)] not in A:
                    out.append(Violation("not closed under product", (a, b)))
        return out

    @cached_property
    def groupoid(self) -> FiniteGroupoid:
        return self.ambient.restrict(self.sub, f"{self.ambient.name}|A")


@dataclass(eq=False)
class GroupoidMorphism:
    source: FiniteGroupoid
    target: FiniteGroupoid
    on_objects: dict
    on_arrows: dict

    def violations(self) -> list[Violation]:
        L, U = self.source, self.target
        out = []
        for x in L.objects:
            if self.on_objects.get(x) not in U.objects:
                out.append(Violation("object image", (x,)))
        for a in L.arrows:
            b = self.on_arrows.get(a)
            if b not in U.src:
                out.append(Violation("arrow image", (a,)))
                continue
            if U.src[b] != self.on_objects.get(L.src[a]) or U.tgt[b] != self.on_objects.get(L.tgt[a]):
                out.append(Violation("endpoints", (a, b)))
        if out:
            return out
        for a, b in L.nerve(2):
            if self.on_arrows[L.mult[(a, b)]] != U.mult.get((self.on_arrows[a], self.on_arrows[b])):
                out.append(Violation("multiplicativity", (a, b)))
        return out

    def __call__(self, a):
        return self.on_arrows[a]

    def then(self, other: "GroupoidMorphism") -> "GroupoidMorphism":
        """``other ∘ self``."""
        return GroupoidMorphism(
            self.source, other.target,
            {x: other.on_objects[y] for x, y in self.on_objects.items()},
            {a: other.on_arrows[b] for a, b in self.on_arrows.items()},
        )


def identity_morphism(L: FiniteGroupoid) -> GroupoidMorphism:
    return GroupoidMorphism(L, L, {x: x for x in L.objects}, {a: a for a in L.arrows})


def inclusion(pair: GroupoidPair) -> GroupoidMorphism:
    A = pair.groupoid
    return GroupoidMorphism(A, pair.ambient, {x: x for x in A.objects}, {a: a for a in A.arrows})


@dataclass(eq=False)
class GroupoidModule:
    """``action[γ]`` is a ``dim E_tgt × dim E_src`` matrix."""

    base: FiniteGroupoid
    fibers: dict
    action: dict

    def violations(self) -> list[Violation]:
        G = self.base
        out = []
        for a in G.arrows:
            M = self.action.get(a)
            want = (self.fibers[G.tgt[a]], self.fibers[G.src[a]])
            if M is None or M.shape != want:
                out.append(Violation("action shape", (a, want)))
        if out:
            return out
        for x, u in G.unit.items():
            if self.action[u] != Matrix.identity(self.fibers[x]):
                out.append(Violation("unit does not act by identity", (u,)))
        for a, b in G.nerve(2):
            if self.action[G.mult[(a, b)]] != self.action[a] @ self.action[b]:
                out.append(Violation("action not multiplicative", (a, b)))
        return out

    def rank_at(self, x) -> int:
        return self.fibers[x]


def trivial_groupoid_module(G: FiniteGroupoid, dim: int = 1) -> GroupoidModule:
    return GroupoidModule(G, {x: dim for x in G.objects}, {a: Matrix.identity(dim) for a in G.arrows})


def pullback_module(phi: GroupoidMorphism, E: GroupoidModule) -> GroupoidModule:
    L = phi.source
    return GroupoidModule(
        L, {x: E.fibers[phi.on_objects[x]] for x in L.objects}, {a: E.action[phi(a)] for a in L.arrows}
    )


def validate(obj) -> ValidationReport:
    """Exhaustive axiom check for groupoids, pairs, morphisms, modules and bibundles."""
    v = obj.violations()
    return ValidationReport(not v, v)


# -- cohomology ------------------------------------------------------------------------


class CochainSpace:
    """Coordinates of ``C^n``: one block per composable tuple, of size ``dim E_{tgt(γ1)}``."""

    def __init__(self, G: FiniteGroupoid, E: GroupoidModule, n: int):
        self.G, self.E, self.n = G, E, n
        self.tuples = G.nerve(n)
        self.offset = {}
        pos = 0
        for t in self.tuples:
            self.offset[t] = pos
            pos += E.fibers[self.base_point(t)]
        self.dim = pos

    def base_point(self, t: tuple):
        return t[0] if self.n == 0 else self.G.tgt[t[0]]

    def block(self, t: tuple) -> range:
        o = self.offset[t]
        return range(o, o + self.E.fibers[self.base_point(t)])


def _boundary_rows(G: FiniteGroupoid, E: GroupoidModule, n: int) -> tuple[list[dict], int]:
    """Sparse rows of ``∂_n F(γ0…γn) = γ0·F(γ1…γn) - Σ_i (-1)^i F(…γiγi+1…) - (-1)^n F(γ0…γn-1)``."""
    dom, cod = CochainSpace(G, E, n), CochainSpace(G, E, n + 1)
    rows: list[dict] = [dict() for _ in range(cod.dim)]

    def add(row_block: range, col_block: range, M: Matrix | None, sign: int):
        for r, rr in enumerate(row_block):
            row = rows[rr]
            for c, cc in enumerate(col_block):
                v = (M[r, c] if M is not None else int(r == c)) * sign
                if v:
                    row[cc] = row.get(cc, 0) + v

    for t in cod.tuples:
        out = cod.block(t)
        g0 = t[0]
        rest = (G.src[g0],) if n == 0 else t[1:]
        add(out, dom.block(rest), E.action[g0], 1)
        for i in range(n):
            merged = t[:i] + (G.mult[(t[i], t[i + 1])],) + t[i + 2:]
            add(out, dom.block(merged), None, -(-1) ** i)
        last = (G.tgt[g0],) if n == 0 else t[:-1]
        add(out, dom.block(last), None, -(-1) ** n)
    return [{j: v for j, v in row.items() if v} for row in rows], dom.dim


def _boundary(G: FiniteGroupoid, E: GroupoidModule, n: int) -> Matrix:
    rows, ncols = _boundary_rows(G, E, n)
    dense = []
    for row in rows:
        r = [0] * ncols
        for j, v in row.items():
            r[j] = v
        dense.append(r)
    return Matrix(dense, cols=ncols)


def square_zero_witness(G: FiniteGroupoid, E: GroupoidModule, n: int):
    """First ``(row, column)`` where ``∂_{n+1}∂_n`` is nonzero, or None; computed on sparse rows."""
    upper, _ = _boundary_rows(G, E, n + 1)
    lower, _ = _boundary_rows(G, E, n)
    for i, row in enumerate(upper):
        acc: dict = {}
        for k, a in row.items():
            for j, b in lower[k].items():
                acc[j] = acc.get(j, 0) + a * b
        for j, v in acc.items():
            if v:
                return (i, j)
    return None


@dataclass
class GroupoidCohomology:
    dims: dict = field(default_factory=dict)  # n -> (z, b, h)
    cocycles: dict = field(default_factory=dict)
    coboundaries: dict = field(default_factory=dict)
    classes: dict = field(default_factory=dict)
    square_zero: bool = True

    def h(self, n: int) -> int:
        return self.dims[n][2]

    def to_json(self) -> dict:
        return {
            "dims": {str(n): {"Z": z, "B": b, "H": h} for n, (z, b, h) in self.dims.items()},
            "square_zero": self.square_zero,
            "representative": "smallest label",
        }


def boundary_matrix(G: FiniteGroupoid, E: GroupoidModule, n: int) -> Matrix:
    if n > 2:
        raise ValueError("boundaries above ∂_2 are not materialized")
    return _boundary(G, E, n)


def groupoid_cohomology(G: FiniteGroupoid, E: GroupoidModule, top: int = 2) -> GroupoidCohomology:
    """``Z^k``, ``B^k`` and ``H^k`` for ``k ≤ top ≤ 2``, with ``∂²=0`` checked."""
    if top > 2:
        raise ValueError("cohomology is computed up to degree 2")
    D = [boundary_matrix(G, E, n) for n in range(top + 1)]
    out = GroupoidCohomology()
    out.square_zero = all(square_zero_witness(G, E, n) is None for n in range(top))
    for n in range(top + 1):
        Z = kernel(D[n]).basis
        if n == 0:
            B = ()
        else:
            B = Subspace.span(D[n - 1].columns(), D[n - 1].rows).basis if D[n - 1].cols else ()
        span = Subspace.span(B, D[n].cols)
        reps = []
        for z in Z:
            if not span.contains(z):
                reps.append(z)
                span = Subspace.span(list(span.basis) + [z], D[n].cols)
        out.dims[n] = (len(Z), len(B), len(reps))
        out.cocycles[n], out.coboundaries[n], out.classes[n] = Z, B, reps
    return out


def coboundary_of(G: FiniteGroupoid, E: GroupoidModule, section: Mapping) -> dict:
    """``γ ↦ γ·e_src - e_tgt`` computed pointwise."""
    return {a: vec(E.action[a].apply(section[G.src[a]])[i] - section[G.tgt[a]][i]
                   for i in range(E.fibers[G.tgt[a]])) for a in G.arrows}


def is_cocycle(G: FiniteGroupoid, E: GroupoidModule, F: Mapping) -> bool:
    """``F(γ1γ2) = γ1·F(γ2) + F(γ1)`` on all composable pairs."""
    for a, b in G.nerve(2):
        lhs = vec(F[G.mult[(a, b)]])
        rhs = tuple(x + y for x, y in zip(E.action[a].apply(F[b]), F[a]))
        if lhs != rhs:
            return False
    return True


# -- coset space -------------------------------------------------------------------------


@dataclass
class CosetSpace:
    pair: GroupoidPair
    classes: list[tuple]          # each sorted by label, representative first
    class_of: dict                # arrow -> index

    def representative(self, k: int):
        return self.classes[k][0]

    def tbar(self, k: int):
        return self.pair.ambient.tgt[self.classes[k][0]]

    def act(self, a, k: int) -> int:
        L = self.pair.ambient
        g = self.classes[k][0]
        if L.src[a] != L.tgt[g]:
            raise ValueError("arrow and coset are not composable")
        return self.class_of[L.mult[(a, g)]]

    def unit_section(self) -> dict:
        return {x: self.class_of[u] for x, u in self.pair.ambient.unit.items()}

    def __len__(self) -> int:
        return len(self.classes)


def coset_space(pair: GroupoidPair) -> CosetSpace:
    """Orbits of the right action ``γ ~ γ·a`` of the subgroupoid."""
    L, A = pair.ambient, pair.sub
    class_of, classes = {}, []
    for g in L.arrows:
        if g in class_of:
            continue
        orb = sorted({L.mult[(g, a)] for a in A if L.tgt[a] == L.src[g]}, key=label_key)
        for h in orb:
            class_of[h] = len(classes)
        classes.append(tuple(orb))
    return CosetSpace(pair, classes, class_of)


# -- bibundles ---------------------------------------------------------------------------


class Bibundle:
    """A generalized morphism ``left ⇸ right`` realized by a finite set with commuting actions.

    ``left_action[(γ, p)]`` and ``right_action[(p, υ)]`` are defined when
    ``src(γ) = l(p)`` and ``r(p) = tgt(υ)`` respectively.
    """

    def __init__(self, left: FiniteGroupoid, right: FiniteGroupoid, carrier: Iterable,
                 l: Mapping, r: Mapping, left_action: Mapping, right_action: Mapping,
                 name: str = "", classes: Mapping | None = None):
        self.left, self.right = left, right
        self.carrier = tuple(sorted(carrier, key=label_key))
        self.l, self.r = dict(l), dict(r)
        self.left_action, self.right_action = dict(left_action), dict(right_action)
        self.name = name
        self.classes = dict(classes) if classes is not None else None

    def __repr__(self) -> str:
        return f"Bibundle({self.name or '?'}: {self.left.name} ⇸ {self.right.name}, |P|={len(self.carrier)})"

    def act_left(self, g, p):
        return self.left_action[(g, p)]

    def act_right(self, p, u):
        return self.right_action[(p, u)]

    def fiber(self, x) -> list:
        return [p for p in self.carrier if self.l[p] == x]

    @cached_property
    def _division(self) -> dict:
        out: dict = {}
        for (p, u), q in self.right_action.items():
            out.setdefault((p, q), []).append(u)
        return out

    def division(self, p, q):
        """The unique ``υ`` with ``p·υ = q``."""
        if self.l[p] != self.l[q]:
            raise ValueError(f"{p!r} and {q!r} lie in different l-fibers")
        us = self._division.get((p, q), [])
        if len(us) != 1:
            raise ValueError(f"division D({p!r}, {q!r}) is not unique: {us}")
        return us[0]

    def violations(self) -> list[Violation]:
        L, U = self.left, self.right
        out = []
        P = set(self.carrier)
        for p in self.carrier:
            if self.l.get(p) not in L.objects or self.r.get(p) not in U.objects:
                out.append(Violation("anchor", (p,)))
        if out:
            return out
        for g in L.arrows:
            for p in self.carrier:
                defined = (g, p) in self.left_action
                if L.src[g] != self.l[p]:
                    if defined:
                        out.append(Violation("left action on non-composable pair", (g, p)))
                    continue
                if not defined or self.left_action[(g, p)] not in P:
                    out.append(Violation("left action undefined", (g, p)))
                    continue
                q = self.left_action[(g, p)]
                if self.l[q] != L.tgt[g] or self.r[q] != self.r[p]:
                    out.append(Violation("left action moves anchors wrongly", (g, p, q)))
        for p in self.carrier:
            for u in U.arrows:
                defined = (p, u) in self.right_action
                if self.r[p] != U.tgt[u]:
                    if defined:
                        out.append(Violation("right action on non-composable pair", (p, u)))
                    continue
                if not defined or self.right_action[(p, u)] not in P:
                    out.append(Violation("right action undefined", (p, u)))
                    continue
                q = self.right_action[(p, u)]
                if self.r[q] != U.src[u] or self.l[q] != self.l[p]:
                    out.append(Violation("right action moves anchors wrongly", (p, u, q)))
        if out:
            return out
        for p in self.carrier:
            if self.left_action[(L.unit[self.l[p]], p)] != p:
                out.append(Violation("left unit", (p,)))
            if self.right_action[(p, U.unit[self.r[p]])] != p:
                out.append(Violation("right unit", (p,)))
        for g, h in L.nerve(2):
            for p in self.fiber(L.src[h]):
                if self.left_action[(L.mult[(g, h)], p)] != self.left_action[(g, self.left_action[(h, p)])]:
                    out.append(Violation("left action not associative", (g, h, p)))
        for u, v in U.nerve(2):
            for p in self.carrier:
                if self.r[p] != U.tgt[u]:
                    continue
                if self.right_action[(p, U.mult[(u, v)])] != self.right_action[(self.right_action[(p, u)], v)]:
                    out.append(Violation("right action not associative", (p, u, v)))
        for (g, p), gp in self.left_action.items():
            for u in U.arrows:
                if U.tgt[u] == self.r[p]:
                    if self.right_action[(gp, u)] != self.left_action[(g, self.right_action[(p, u)])]:
                        out.append(Violation("actions do not commute", (g, p, u)))
        for x in L.objects:
            if not any(self.l[p] == x for p in self.carrier):
                out.append(Violation("l not surjective", (x,)))
        for p in self.carrier:
            for q in self.fiber(self.l[p]):
                n = len(self._division.get((p, q), []))
                if n != 1:
                    out.append(Violation("right action not free and fiber-transitive", (p, q, n)))
        if out:
            return out
        out.extend(self.division_violations())
        return out

    def division_violations(self) -> list[Violation]:
        """Morphism, invariance and equivariance properties of ``D``."""
        L, U = self.left, self.right
        out = []
        for p in self.carrier:
            F = self.fiber(self.l[p])
            if self.division(p, p) != U.unit[self.r[p]]:
                out.append(Violation("D(p,p) is not a unit", (p,)))
            for q in F:
                for s in F:
                    if U.mult[(self.division(p, q), self.division(q, s))] != self.division(p, s):
                        out.append(Violation("D(p,q)D(q,s) != D(p,s)", (p, q, s)))
                for g in L.arrows:
                    if L.src[g] == self.l[p]:
                        if self.division(self.left_action[(g, p)], self.left_action[(g, q)]) != self.division(p, q):
                            out.append(Violation("D not left-invariant", (g, p, q)))
                for u in U.arrows:
                    if U.tgt[u] != self.r[p]:
                        continue
                    for v in U.arrows:
                        if U.tgt[v] != self.r[q]:
                            continue
                        lhs = self.division(self.right_action[(p, u)], self.right_action[(q, v)])
                        rhs = U.mult[(U.mult[(U.inverse[u], self.division(p, q))], v)]
                        if lhs != rhs:
                            out.append(Violation("D not right-equivariant", (p, q, u, v)))
        return out


def unit_bibundle(L: FiniteGroupoid) -> Bibundle:
    """Carrier ``L`` with ``l = tgt``, ``r = src`` and multiplication on both sides."""
    return Bibundle(
        L, L, L.arrows, L.tgt, L.src,
        {(g, p): L.mult[(g, p)] for g in L.arrows for p in L.arrows if L.composable(g, p)},
        {(p, u): L.mult[(p, u)] for p in L.arrows for u in L.arrows if L.composable(p, u)},
        f"Id_{L.name}",
    )


def isotropy_group(L: FiniteGroupoid, x) -> FiniteGroupoid:
    loops = {a: (x, x) for a in L.hom(x, x)}
    return FiniteGroupoid([x], loops, {k: v for k, v in L.mult.items() if k[0] in loops and k[1] in loops},
                          f"{L.name}_{x}")


def isotropy_bibundle(L: FiniteGroupoid, x) -> Bibundle:
    """``L ⇸ L_x`` carried by the arrows leaving ``x``; Morita exactly when ``L`` is transitive."""
    H = isotropy_group(L, x)
    P = [a for a in L.arrows if L.src[a] == x]
    la = {(g, p): L.mult[(g, p)] for g in L.arrows for p in P if L.composable(g, p)}
    ra = {(p, h): L.mult[(p, h)] for p in P for h in H.arrows}
    return Bibundle(L, H, P, {p: L.tgt[p] for p in P}, {p: x for p in P}, la, ra, f"{L.name}⇸{H.name}")


def bundlization(phi: GroupoidMorphism) -> Bibundle:
    """Carrier ``{(x, υ) : φ0(x) = tgt(υ)}``; ``γ·(x,υ) = (tgt γ, φ(γ)υ)`` and ``(x,υ)·υ' = (x, υυ')``."""
    bad = phi.violations()
    if bad:
        raise ValueError(f"invalid groupoid morphism: {bad[0]}")
    L, U = phi.source, phi.target
    P = [(x, u) for x in L.objects for u in U.arrows if U.tgt[u] == phi.on_objects[x]]
    la = {}
    for g in L.arrows:
        for x, u in P:
            if L.src[g] == x:
                la[(g, (x, u))] = (L.tgt[g], U.mult[(phi(g), u)])
    ra = {((x, u), v): (x, U.mult[(u, v)]) for x, u in P for v in U.arrows if U.src[u] == U.tgt[v]}
    return Bibundle(L, U, P, {p: p[0] for p in P}, {p: U.src[p[1]] for p in P}, la, ra,
                    f"bundle({L.name}→{U.name})")


def compose(P: Bibundle, Q: Bibundle) -> Bibundle:
    """``P ∘ Q``: classes of ``(p, q)`` with ``r(p) = l(q)`` under ``(p, q) ~ (p·υ, υ⁻¹·q)``.

    A class is labelled by its smallest representative pair; ``.classes``
    maps every pair to its label.
    """
    if P.right != Q.left:
        raise ValueError("middle groupoids differ")
    U = P.right
    pairs = [(p, q) for p in P.carrier for q in Q.carrier if P.r[p] == Q.l[q]]
    cls: dict = {}
    for pq in pairs:
        if pq in cls:
            continue
        p, q = pq
        orb = {(P.right_action[(p, u)], Q.left_action[(U.inverse[u], q)])
               for u in U.arrows if U.tgt[u] == P.r[p]}
        rep = smallest(orb)
        for o in orb:
            cls[o] = rep
    carrier = sorted(set(cls.values()), key=label_key)
    la = {}
    for g in P.left.arrows:
        for p, q in carrier:
            if P.left.src[g] == P.l[p]:
                la[(g, (p, q))] = cls[(P.left_action[(g, p)], q)]
    ra = {}
    for p, q in carrier:
        for v in Q.right.arrows:
            if Q.right.tgt[v] == Q.r[q]:
                ra[((p, q), v)] = cls[(p, Q.right_action[(q, v)])]
    return Bibundle(
        P.left, Q.right, carrier,
        {c: P.l[c[0]] for c in carrier}, {c: Q.r[c[1]] for c in carrier}, la, ra,
        f"{P.name}∘{Q.name}", classes=cls,
    )


def opposite(P: Bibundle) -> Bibundle:
    """``υ·p = p·υ⁻¹`` and ``p·γ = γ⁻¹·p``."""
    L, U = P.left, P.right
    la = {(u, p): P.right_action[(p, U.inverse[u])] for u in U.arrows for p in P.carrier if U.src[u] == P.r[p]}
    ra = {(p, g): P.left_action[(L.inverse[g], p)] for g in L.arrows for p in P.carrier if L.tgt[g] == P.l[p]}
    return Bibundle(U, L, P.carrier, P.r, P.l, la, ra, f"{P.name}^op")


def isomorphism_violations(P: Bibundle, Q: Bibundle, f: Mapping) -> list[Violation]:
    """Check that ``f: P -> Q`` is a bijection preserving anchors and both actions."""
    out = []
    if set(f) != set(P.carrier) or sorted(map(repr, f.values())) != sorted(map(repr, Q.carrier)) \
            or len(set(f.values())) != len(Q.carrier):
        return [Violation("not a bijection", (len(P.carrier), len(Q.carrier)))]
    for p in P.carrier:
        if Q.l[f[p]] != P.l[p] or Q.r[f[p]] != P.r[p]:
            out.append(Violation("anchors not preserved", (p, f[p])))
    for (g, p), gp in P.left_action.items():
        if Q.left_action[(g, f[p])] != f[gp]:
            out.append(Violation("not left-equivariant", (g, p)))
    for (p, u), pu in P.right_action.items():
        if Q.right_action[(f[p], u)] != f[pu]:
            out.append(Violation("not right-equivariant", (p, u)))
    return out


def left_unit_map(P: Bibundle, composite: Bibundle) -> dict:
    """``Id_L ∘ P -> P``, ``[(γ, p)] ↦ γ·p``."""
    return {(g, p): P.left_action[(g, p)] for g, p in composite.carrier}


def right_unit_map(P: Bibundle, composite: Bibundle) -> dict:
    """``P ∘ Id_U -> P``, ``[(p, υ)] ↦ p·υ``."""
    return {(p, u): P.right_action[(p, u)] for p, u in composite.carrier}


def associator(PQ_R: Bibundle, P_QR: Bibundle, QR: Bibundle) -> dict:
    """``(P∘Q)∘R -> P∘(Q∘R)``, ``[([p,q], r)] ↦ [(p, [q,r])]``."""
    return {c: P_QR.classes[(c[0][0], QR.classes[(c[0][1], c[1])])] for c in PQ_R.carrier}


def functoriality_map(composite: Bibundle, psi: GroupoidMorphism, target: Bibundle) -> dict:
    """``bund(φ)∘bund(ψ) -> bund(ψφ)``, ``[((x,υ),(y,v))] ↦ (x, ψ(υ)v)``."""
    V = psi.target
    return {c: (c[0][0], V.mult[(psi(c[0][1]), c[1][1])]) for c in composite.carrier}


@dataclass
class MoritaReport:
    is_morita: bool
    violations: list[Violation]
    inverse: Bibundle | None = None
    left_iso_ok: bool = False
    right_iso_ok: bool = False

    def to_json(self) -> dict:
        return {
            "is_morita": self.is_morita,
            "violations": [v.to_json() for v in self.violations[:50]],
            "P∘P^op≅Id_L": self.left_iso_ok,
            "P^op∘P≅Id_U": self.right_iso_ok,
        }


def is_morita(P: Bibundle) -> MoritaReport:
    """True when ``P^op`` is also a generalized morphism; the two unit isomorphisms are then built and checked."""
    own = P.violations()
    if own:
        return MoritaReport(False, own)
    Pop = opposite(P)
    bad = Pop.violations()
    if bad:
        return MoritaReport(False, bad)
    L, U = P.left, P.right
    left = compose(P, Pop)
    fl = {(p, q): Pop.division(p, q) for p, q in left.carrier}
    right = compose(Pop, P)
    fr = {(p, q): P.division(p, q) for p, q in right.carrier}
    lv = isomorphism_violations(left, unit_bibundle(L), fl)
    rv = isomorphism_violations(right, unit_bibundle(U), fr)
    return MoritaReport(not lv and not rv, lv + rv, Pop, not lv, not rv)


# -- associated modules ------------------------------------------------------------------


@dataclass
class AssociatedModule:
    module: GroupoidModule
    representatives: dict
    convention: str


def associated_module(P: Bibundle, E: GroupoidModule, convention: str = "smallest") -> AssociatedModule:
    """Fiber at ``x`` is ``E_{r(p_x)}`` for a chosen ``p_x ∈ l⁻¹(x)``; ``γ: x -> y`` acts by ``E(D(p_y, γ·p_x))``."""
    if convention not in ("smallest", "largest"):
        raise ValueError("convention must be 'smallest' or 'largest'")
    pick = smallest if convention == "smallest" else largest
    L = P.left
    reps = {x: pick(P.fiber(x)) for x in L.objects}
    fibers = {x: E.fibers[P.r[reps[x]]] for x in L.objects}
    action = {}
    for g in L.arrows:
        x, y = L.src[g], L.tgt[g]
        action[g] = E.action[P.division(reps[y], P.left_action[(g, reps[x])])]
    return AssociatedModule(GroupoidModule(L, fibers, action), reps, convention)


def convention_intertwiner(P: Bibundle, E: GroupoidModule, a: AssociatedModule, b: AssociatedModule) -> dict:
    """``T_x = E(D(q_x, p_x))`` from the ``a``-fibers to the ``b``-fibers."""
    return {x: E.action[P.division(b.representatives[x], a.representatives[x])] for x in P.left.objects}


def is_intertwiner(M: GroupoidModule, N: GroupoidModule, T: Mapping) -> bool:
    G = M.base
    if any(T[x].rank() != M.fibers[x] or M.fibers[x] != N.fibers[x] for x in G.objects):
        return False
    return all(T[G.tgt[g]] @ M.action[g] == N.action[g] @ T[G.src[g]] for g in G.arrows)


@dataclass
class InvarianceReport:
    dims_source: dict
    dims_target: dict
    equal: bool
    is_morita: bool

    def to_json(self) -> dict:
        return {"H_target_module": self.dims_target, "H_associated": self.dims_source,
                "equal": self.equal, "is_morita": self.is_morita}


def morita_invariance(P: Bibundle, E: GroupoidModule, degrees: Sequence[int] = (0, 1)) -> InvarianceReport:
    """Compare ``dim H^k(right, E)`` with ``dim H^k(left, associated_module(P, E))``.

    The comparison is also run for non-Morita ``P`` so that negative controls
    can be observed; ``is_morita`` records which case applies.
    """
    top = max(degrees)
    assoc = associated_module(P, E).module
    hs = groupoid_cohomology(P.left, assoc, top)
    ht = groupoid_cohomology(P.right, E, top)
    ds = {k: hs.h(k) for k in degrees}
    dt = {k: ht.h(k) for k in degrees}
    return InvarianceReport(ds, dt, ds == dt, is_morita(P).is_morita)


def morita_h1_invariance(P: Bibundle, E: GroupoidModule) -> InvarianceReport:
    rep = is_morita(P)
    if not rep.is_morita:
        raise ValueError("bibundle is not a Morita morphism")
    out = morita_invariance(P, E)
    assert out.equal, f"cohomology dims differ across a Morita bibundle: {out}"
    return out

"""Built-in examples: Lie algebra pairs with known Atiyah verdicts, and small groupoids.

Basis conventions are the ones of the standard algebras in :mod:`liepair.lie`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable

from . import groupoid as gp
from .lie import (
    LieAlgebra,
    LiePair,
    Representation,
    heisenberg,
    make_pair,
    semidirect,
    sl2,
    so3,
    solvable2d,
)
from .linalg import Matrix


@dataclass
class CatalogEntry:
    name: str
    pair: LiePair
    verdict: str                      # "zero" or "nonzero" for the Bott module
    derivation: str
    module: Representation | None = None
    alternative_complements: list = field(default_factory=list)

    def summary(self) -> str:
        g = self.pair.g
        return (f"{self.name}: dim g = {g.dim}, dim h = {self.pair.h_dim}, "
                f"class {self.verdict}. {self.derivation}")


def _abelian(n: int) -> CatalogEntry:
    g = LieAlgebra.abelian(n, name=f"abelian{n}")
    e1 = [1] + [0] * (n - 1)
    alt = [[[1 if k == j else 0 for k in range(n)] for j in range(1, n)]]
    if n > 1:
        alt.append([[1] + [1 if k == j else 0 for k in range(1, n)] for j in range(1, n)])
    return CatalogEntry(
        f"abelian_{n}", make_pair(g, [e1], name=f"abelian_{n}"), "zero",
        "All brackets vanish, so the zero extension is compatible.",
        alternative_complements=alt,
    )


def _heisenberg_center() -> CatalogEntry:
    return CatalogEntry(
        "heisenberg_center", make_pair(heisenberg(), [(0, 0, 1)], name="heisenberg_center"), "zero",
        "z is central and acts by zero on g/h, so every term of the cocycle of the zero extension vanishes.",
        alternative_complements=[[(1, 0, 1), (0, 1, 0)]],
    )


def _sl2_borel() -> CatalogEntry:
    return CatalogEntry(
        "sl2_borel", make_pair(sl2(), [(1, 0, 0), (0, 1, 0)], name="sl2_borel"), "nonzero",
        "The cocycle of the zero extension is X ↦ 2μ0 while coboundaries are multiples of H ↦ 2μ0; "
        "there is no invariant complement.",
        alternative_complements=[[(1, 1, 1)]],
    )


def _sl2_cartan() -> CatalogEntry:
    return CatalogEntry(
        "sl2_cartan", make_pair(sl2(), [(1, 0, 0)], name="sl2_cartan"), "zero",
        "span(X, Y) is an H-invariant complement (reductive).",
        alternative_complements=[[(1, 1, 0), (0, 0, 1)]],
    )


def _so3_so2() -> CatalogEntry:
    return CatalogEntry(
        "so3_so2", make_pair(so3(), [(0, 0, 1)], name="so3_so2"), "zero",
        "Reductive: span(e1, e2) is e3-invariant and the zero extension is compatible.",
        alternative_complements=[[(1, 0, 1), (0, 1, -1)]],
    )


def _solvable2d() -> CatalogEntry:
    return CatalogEntry(
        "solvable2d", make_pair(solvable2d(), [(1, 0)], name="solvable2d"), "zero",
        "h = span(a) with [a, b] = b; span(b) is an invariant complement.",
        alternative_complements=[[(1, 1)]],
    )


def _matched_sl2() -> CatalogEntry:
    g = sl2()
    return CatalogEntry(
        "matched_sl2", make_pair(g, [(0, 0, 1)], [(1, 0, 0), (0, 1, 0)], name="matched_sl2"), "zero",
        "sl2 = span(H, X) ⊕ span(Y) with h = span(Y); the cocycle of the zero extension is a "
        "coboundary, so a compatible connection exists although no invariant complement does.",
        alternative_complements=[[(1, 0, 1), (0, 1, 0)]],
    )


def sl2_ltimes_std() -> LieAlgebra:
    """``sl2 ⋉ ℚ²`` with basis (H, X, Y, u, v)."""
    std = (Matrix([[1, 0], [0, -1]]), Matrix([[0, 1], [0, 0]]), Matrix([[0, 0], [1, 0]]))
    ideal = LieAlgebra.abelian(2, ("u", "v"))
    return semidirect(sl2(), ideal, std, "sl2⋉Q2")


def _sl2_ltimes_std() -> CatalogEntry:
    g = sl2_ltimes_std()
    h = [[1 if k == i else 0 for k in range(5)] for i in range(3)]
    return CatalogEntry(
        "sl2_ltimes_std", make_pair(g, h, name="sl2_ltimes_std"), "zero",
        "h = sl2 is semisimple, so every module has vanishing class; the ideal is an invariant complement.",
    )


_FIXED: dict[str, Callable[[], CatalogEntry]] = {
    "heisenberg_center": _heisenberg_center,
    "sl2_borel": _sl2_borel,
    "sl2_cartan": _sl2_cartan,
    "so3_so2": _so3_so2,
    "solvable2d": _solvable2d,
    "matched_sl2": _matched_sl2,
    "sl2_ltimes_std": _sl2_ltimes_std,
}


def example(name: str) -> CatalogEntry:
    m = re.fullmatch(r"abelian_(\d+)", name)
    if m:
        n = int(m.group(1))
        if not 1 <= n <= 12:
            raise KeyError(f"abelian_n needs 1 <= n <= 12, got {n}")
        return _abelian(n)
    try:
        return _FIXED[name]()
    except KeyError:
        raise KeyError(f"unknown catalog pair {name!r}; known: {', '.join(pair_names())}") from None


def pair_names() -> list[str]:
    return ["abelian_n"] + list(_FIXED)


def examples_list() -> list[CatalogEntry]:
    """One entry per catalog name, with ``abelian_n`` shown as ``abelian_3``."""
    return [example("abelian_3")] + [f() for f in _FIXED.values()]


# -- groupoids ---------------------------------------------------------------------------


def z2_free() -> gp.FiniteGroupoid:
    """``ℤ/2`` acting freely on two points by swapping them."""
    return gp.action_groupoid(gp.cyclic(2), [0, 1], lambda g, x: (x + g) % 2, "Z2⋉2")


def groupoid(name: str) -> gp.FiniteGroupoid:
    """``pair_N``, ``cyclic_N``, ``units_N``, ``sym3``, ``point``, ``z2_free``."""
    m = re.fullmatch(r"(pair|cyclic|units)_(\d+)", name)
    if m:
        kind, n = m.group(1), int(m.group(2))
        if not 1 <= n <= 8:
            raise KeyError(f"{kind}_N needs 1 <= N <= 8")
        if kind == "pair":
            return gp.pair_groupoid(list(range(n)), name)
        if kind == "cyclic":
            return gp.cyclic(n)
        return gp.units_groupoid(list(range(n)), name)
    fixed = {"sym3": gp.sym3, "point": gp.point, "z2_free": z2_free}
    if name in fixed:
        return fixed[name]()
    raise KeyError(f"unknown catalog groupoid {name!r}")


def to_point(L: gp.FiniteGroupoid) -> gp.Bibundle:
    """For a transitive groupoid with trivial isotropy: carrier = objects, right factor = point."""
    pt = gp.point()
    X = L.objects
    return gp.Bibundle(
        L, pt, X, {x: x for x in X}, {x: "*" for x in X},
        {(g, x): L.tgt[g] for g in L.arrows for x in X if L.src[g] == x},
        {(x, "e"): x for x in X},
        f"{L.name}⇸point",
    )


def bibundle(name: str) -> gp.Bibundle:
    """``pair_N_to_point``, ``z2_free_to_point``, ``unit_<groupoid>``, ``point_to_units_2``."""
    m = re.fullmatch(r"pair_(\d+)_to_point", name)
    if m:
        return to_point(groupoid(f"pair_{m.group(1)}"))
    if name == "z2_free_to_point":
        return to_point(z2_free())
    if name.startswith("unit_"):
        return gp.unit_bibundle(groupoid(name[5:]))
    if name == "point_to_units_2":
        U = groupoid("units_2")
        phi = gp.GroupoidMorphism(gp.point(), U, {"*": 0}, {"e": ("1", 0)})
        return gp.bundlization(phi)
    raise KeyError(f"unknown catalog bibundle {name!r}")

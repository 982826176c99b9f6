"""The invariant suite run by ``liepair selftest``.

Every check returns a :class:`Check`; failures carry a witness.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable

from . import groupoid as gp
from .atiyah import atiyah_class, atiyah_cocycle, extend_action, reductive_certificate, semisimple_certificate
from .catalog import bibundle, example, examples_list, groupoid
from .cohomology import differential, differential_matrix, solve_coboundary
from .envelope import envelope
from .lie import bott_module, validate_algebra
from .linalg import Matrix
from .pbw import check_coalgebra, check_equivariance, pbw_build


@dataclass
class Check:
    name: str
    ok: bool
    witness: Any = None

    def to_json(self) -> dict:
        return {"name": self.name, "pass": self.ok, "witness": self.witness}


def random_matrix(rng: random.Random, m: int, lo: int = -3, hi: int = 3) -> Matrix:
    return Matrix([[Fraction(rng.randint(lo, hi), rng.randint(1, 2)) for _ in range(m)] for _ in range(m)], cols=m)


def random_extension(rng: random.Random, pair, module):
    m = module.dim
    return extend_action(pair, module, [random_matrix(rng, m) for _ in pair.complement])


def _catalog_valid() -> Check:
    for e in examples_list():
        bad = validate_algebra(e.pair.g)
        if bad:
            return Check("catalog algebras valid", False, {"entry": e.name, "violation": bad[0].kind})
        bott_module(e.pair)
    return Check("catalog algebras valid", True)


def _complex() -> Check:
    for e in examples_list():
        W = atiyah_class(e.pair).cocycle.module
        D0, D1 = differential_matrix(W, 0), differential_matrix(W, 1)
        if W.dim and not (D1 @ D0).is_zero():
            return Check("d1 d0 = 0", False, {"entry": e.name})
    return Check("d1 d0 = 0", True)


def _verdicts() -> Check:
    for e in examples_list():
        rep = atiyah_class(e.pair)
        if rep.vanishes != (e.verdict == "zero"):
            return Check("catalog Atiyah verdicts", False, {"entry": e.name, "vanishes": rep.vanishes})
        if rep.vanishes and not atiyah_cocycle(rep.compatible).is_zero():
            return Check("catalog Atiyah verdicts", False, {"entry": e.name, "compatible": "nonzero cocycle"})
    return Check("catalog Atiyah verdicts", True)


def _certificates() -> Check:
    for e in examples_list():
        rep = atiyah_class(e.pair)
        certified = reductive_certificate(e.pair) is not None or semisimple_certificate(e.pair.h)
        if certified and not rep.vanishes:
            return Check("certificates imply vanishing", False, {"entry": e.name})
    return Check("certificates imply vanishing", True)


def _cocycle_axioms(seed: int = 7, per_entry: int = 5) -> Check:
    rng = random.Random(seed)
    for e in examples_list():
        bott = bott_module(e.pair)
        base = atiyah_cocycle(extend_action(e.pair, bott))
        for _ in range(per_entry):
            R = atiyah_cocycle(random_extension(rng, e.pair, bott))
            if not differential(R).is_zero():
                return Check("cocycle closed and class independent", False, {"entry": e.name, "failure": "not closed"})
            if solve_coboundary(R - base) is None:
                return Check("cocycle closed and class independent", False, {"entry": e.name, "failure": "class moved"})
    return Check("cocycle closed and class independent", True)


def _pbw() -> Check:
    for name in ("heisenberg_center", "so3_so2"):
        pair = example(name).pair
        pm = pbw_build(pair, atiyah_class(pair).compatible, 3)
        co, eq = check_coalgebra(pm), check_equivariance(pm)
        if not (co.ok and eq.ok):
            return Check("pbw coalgebra and equivariance", False, {"entry": name, "coalgebra": co.ok, "equivariance": eq.ok})
    pair = example("sl2_borel").pair
    if check_equivariance(pbw_build(pair, None, 2)).ok:
        return Check("pbw coalgebra and equivariance", False, {"entry": "sl2_borel", "failure": "equivariance passed"})
    return Check("pbw coalgebra and equivariance", True)


def _associativity(seed: int = 11) -> Check:
    rng = random.Random(seed)
    for e in examples_list():
        U = envelope(e.pair.g)
        n = e.pair.g.dim
        for _ in range(3):
            a, b, c = (U.word([rng.randrange(n) for _ in range(rng.randint(0, 3))]) for _ in range(3))
            if (a * b) * c != a * (b * c):
                return Check("enveloping algebra associative", False, {"entry": e.name})
    return Check("enveloping algebra associative", True)


def _groupoid_complex() -> Check:
    for name in ("pair_3", "cyclic_2", "cyclic_3", "units_2", "sym3", "z2_free"):
        G = groupoid(name)
        for E in (gp.trivial_groupoid_module(G), gp.trivial_groupoid_module(G, 2)):
            if not gp.groupoid_cohomology(G, E).square_zero:
                return Check("groupoid boundaries square to zero", False, {"groupoid": name})
    return Check("groupoid boundaries square to zero", True)


def _bibundles() -> Check:
    for name in ("pair_3_to_point", "z2_free_to_point", "unit_cyclic_3"):
        P = bibundle(name)
        if P.violations():
            return Check("bibundle unit laws and Morita", False, {"bibundle": name, "failure": "invalid"})
        IdL = gp.unit_bibundle(P.left)
        C = gp.compose(IdL, P)
        bad = gp.isomorphism_violations(C, P, gp.left_unit_map(P, C))
        if bad:
            return Check("bibundle unit laws and Morita", False, {"bibundle": name, "failure": bad[0].kind})
        if not gp.is_morita(P).is_morita:
            return Check("bibundle unit laws and Morita", False, {"bibundle": name, "failure": "not Morita"})
    if gp.is_morita(bibundle("point_to_units_2")).is_morita:
        return Check("bibundle unit laws and Morita", False, {"bibundle": "point_to_units_2", "failure": "negative control passed"})
    return Check("bibundle unit laws and Morita", True)


SUITE: list[Callable[[], Check]] = [
    _catalog_valid,
    _complex,
    _verdicts,
    _certificates,
    _cocycle_axioms,
    _associativity,
    _pbw,
    _groupoid_complex,
    _bibundles,
]


def run_selftest() -> list[Check]:
    out = []
    for fn in SUITE:
        try:
            out.append(fn())
        except Exception as exc:  # a crash is a failed check, reported with its message
            out.append(Check(fn.__name__.strip("_"), False, {"exception": repr(exc)}))
    return out

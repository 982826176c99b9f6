import random
from itertools import product

import pytest
from hypothesis import given, strategies as st

from liepair import groupoid as gp
from liepair.catalog import bibundle, groupoid, to_point, z2_free
from liepair.io import sign_module
from liepair.linalg import Matrix

from groupoid_fixtures import BIBUNDLES, all_pairs, chains, groupoid_zoo, modules_for, morita_cases, projection, sym3_modules

PAIRS = list(all_pairs())
PAIR_IDS = [f"{n}/{m}" for n, _, m, _ in PAIRS]


# -- validation ----------------------------------------------------------------------


@pytest.mark.parametrize("name", list(groupoid_zoo()))
def test_zoo_valid(name):
    G = groupoid_zoo()[name]
    assert gp.validate(G).ok
    for E in modules_for(name, G).values():
        assert gp.validate(E).ok


def test_units_and_inverses_inferred():
    G = groupoid("pair_3")
    assert G.unit == {x: (x, x) for x in range(3)}
    assert G.inverse[(2, 0)] == (0, 2)


def test_planted_non_associative():
    G = gp.cyclic(3)
    mult = dict(G.mult)
    mult[(1, 1)] = 0
    bad = gp.FiniteGroupoid(G.objects, {a: ("*", "*") for a in G.arrows}, mult, "broken")
    rep = gp.validate(bad)
    assert not rep.ok
    triples = [v.witness for v in rep.violations if v.kind == "associativity"]
    assert triples
    a, b, c = triples[0]
    assert mult[(mult[(a, b)], c)] != mult[(a, mult[(b, c)])]


def test_missing_product_and_endpoint():
    G = groupoid("pair_2")
    mult = dict(G.mult)
    del mult[((1, 0), (0, 1))]
    kinds = {v.kind for v in gp.FiniteGroupoid(G.objects, {a: (G.src[a], G.tgt[a]) for a in G.arrows}, mult).violations()}
    assert "missing product" in kinds


def test_module_violations():
    G = gp.cyclic(2)
    E = gp.GroupoidModule(G, {"*": 1}, {0: Matrix([[1]]), 1: Matrix([[2]])})
    assert any(v.kind == "action not multiplicative" for v in gp.validate(E).violations)
    E = gp.GroupoidModule(G, {"*": 1}, {0: Matrix([[-1]]), 1: Matrix([[1]])})
    assert any(v.kind == "unit does not act by identity" for v in E.violations())


def test_pair_and_morphism_validation():
    L = groupoid("pair_3")
    good = gp.GroupoidPair(L, frozenset([(0, 0), (1, 1), (2, 2), (0, 1), (1, 0)]))
    assert gp.validate(good).ok
    assert any(v.kind == "not wide" for v in gp.GroupoidPair(L, frozenset([(0, 0)])).violations())
    assert any(v.kind == "not closed under inverse" for v in
               gp.GroupoidPair(L, frozenset([(0, 0), (1, 1), (2, 2), (0, 1)])).violations())
    phi = gp.GroupoidMorphism(gp.cyclic(2), gp.cyclic(3), {"*": "*"}, {0: 0, 1: 1})
    assert any(v.kind == "multiplicativity" for v in phi.violations())
    with pytest.raises(ValueError):
        gp.bundlization(phi)


# -- cohomology ----------------------------------------------------------------------


@pytest.mark.parametrize("name,G,mname,E", PAIRS, ids=PAIR_IDS)
def test_boundaries_square_to_zero(name, G, mname, E):
    D0, D1, D2 = (gp.boundary_matrix(G, E, n) for n in range(3))
    assert (D1 @ D0).is_zero() and (D2 @ D1).is_zero()
    assert gp.groupoid_cohomology(G, E).square_zero


@pytest.mark.parametrize("name,G,mname,E", PAIRS, ids=PAIR_IDS)
def test_h1_vanishes_and_h0_is_invariants(name, G, mname, E):
    # over ℚ averaging over finite isotropy kills H¹; H⁰ is the space of invariant sections
    H = gp.groupoid_cohomology(G, E, 1)
    assert H.h(1) == 0
    expected = 0
    for orbit in G.orbits():
        x = orbit[0]
        loops = G.hom(x, x)
        n = E.fibers[x]
        rows = []
        for a in loops:
            rows.extend((E.action[a] - Matrix.identity(n)).entries)
        expected += n - Matrix(rows, cols=n).rank()
    assert H.h(0) == expected


def test_pair_groupoid_examples():
    for n in (2, 3):
        H = gp.groupoid_cohomology(groupoid(f"pair_{n}"), gp.trivial_groupoid_module(groupoid(f"pair_{n}")))
        assert (H.h(0), H.h(1)) == (1, 0)


def test_units_only():
    G = groupoid("units_3")
    E = gp.GroupoidModule(G, {0: 1, 1: 2, 2: 3}, {("1", x): Matrix.identity(x + 1) for x in range(3)})
    H = gp.groupoid_cohomology(G, E, 1)
    assert (H.h(0), H.h(1)) == (6, 0)


def _brute_force_sign_h1():
    """Enumerate F: Z2 -> ℚ on a grid, keep pointwise cocycles, compare with coboundaries."""
    sign = {0: 1, 1: -1}
    grid = range(-3, 4)
    cocycles = [F for F in product(grid, repeat=2)
                if all(F[(a + b) % 2] == sign[a] * F[b] + F[a] for a in (0, 1) for b in (0, 1))]
    coboundaries = {(sign[0] * e - e, sign[1] * e - e) for e in grid}
    import sympy
    z = sympy.Matrix(cocycles).rank() if cocycles else 0
    b = sympy.Matrix(sorted(coboundaries)).rank()
    return z, b, z - b


def test_z2_sign_h1_brute_force():
    G = gp.cyclic(2)
    H = gp.groupoid_cohomology(G, sign_module(G))
    assert H.dims[1] == _brute_force_sign_h1()
    assert H.dims[1] == (1, 1, 0)
    assert H.h(0) == 0


@pytest.mark.parametrize("name,G,mname,E", PAIRS[:20], ids=PAIR_IDS[:20])
def test_cocycle_roundtrips(name, G, mname, E):
    rng = random.Random(name + mname)
    section = {x: tuple(rng.randint(-3, 3) for _ in range(E.fibers[x])) for x in G.objects}
    F = gp.coboundary_of(G, E, section)
    assert gp.is_cocycle(G, E, F)
    H = gp.groupoid_cohomology(G, E, 1)
    space = gp.CochainSpace(G, E, 1)
    for z in H.cocycles[1]:
        Fz = {t[0]: tuple(z[i] for i in space.block(t)) for t in space.tuples}
        assert gp.is_cocycle(G, E, Fz)


def test_boundary_degree_limit():
    G = groupoid("point")
    with pytest.raises(ValueError):
        gp.boundary_matrix(G, gp.trivial_groupoid_module(G), 3)


# -- cosets ---------------------------------------------------------------------------


def test_cosets_full_and_units():
    L = groupoid("pair_3")
    full = gp.coset_space(gp.GroupoidPair(L, frozenset(L.arrows)))
    assert len(full) == 3
    units = gp.coset_space(gp.GroupoidPair(L, frozenset(L.unit.values())))
    assert len(units) == 9


def test_cosets_orbit_count():
    L = gp.pair_groupoid([1, 2, 3])
    A = frozenset([(1, 1), (2, 2), (3, 3), (1, 2), (2, 1)])
    C = gp.coset_space(gp.GroupoidPair(L, A))
    # γ ~ γa only changes the source within an A-orbit: 3 targets times 2 source orbits
    brute = {(g[0], frozenset({1, 2}) if g[1] in (1, 2) else frozenset({3})) for g in L.arrows}
    assert len(C) == len(brute) == 6
    for k in range(len(C)):
        assert C.tbar(k) == L.tgt[C.representative(k)]
    sec = C.unit_section()
    for a in A:
        assert C.act(a, sec[L.src[a]]) == sec[L.tgt[a]]


# -- bibundles ------------------------------------------------------------------------


@pytest.mark.parametrize("name", list(BIBUNDLES))
def test_bibundles_valid(name):
    P = BIBUNDLES[name]
    assert gp.validate(P).ok and not P.division_violations()


def test_bibundle_violation_detected():
    P = bibundle("pair_3_to_point")
    broken = gp.Bibundle(P.left, P.right, P.carrier, P.l, P.r,
                         {**P.left_action, ((1, 0), 0): 2}, P.right_action)
    assert not gp.validate(broken).ok


def test_identity_bundlization_is_unit():
    for L in (groupoid("pair_3"), gp.sym3(), z2_free()):
        B = gp.bundlization(gp.identity_morphism(L))
        f = {(x, u): u for x, u in B.carrier}
        assert not gp.isomorphism_violations(B, gp.unit_bibundle(L), f)


def test_inclusion_bundlization_is_ambient():
    L = groupoid("pair_3")
    pair = gp.GroupoidPair(L, frozenset([(0, 0), (1, 1), (2, 2), (0, 1), (1, 0)]))
    A = pair.groupoid
    B = gp.bundlization(gp.inclusion(pair))
    # L as an A ⇸ L bibundle by multiplication on both sides
    target = gp.Bibundle(
        A, L, L.arrows, L.tgt, L.src,
        {(a, g): L.mult[(a, g)] for a in A.arrows for g in L.arrows if L.composable(a, g)},
        {(g, u): L.mult[(g, u)] for g in L.arrows for u in L.arrows if L.composable(g, u)},
    )
    assert gp.validate(target).ok
    assert not gp.isomorphism_violations(B, target, {(x, g): g for x, g in B.carrier})


def test_constant_bundlization_is_graph():
    L, N = groupoid("pair_3"), groupoid("units_2")
    phi = gp.GroupoidMorphism(L, N, {x: 1 for x in L.objects}, {a: ("1", 1) for a in L.arrows})
    B = gp.bundlization(phi)
    assert sorted(B.carrier) == sorted((x, ("1", 1)) for x in L.objects)


def test_division_identities():
    for P in BIBUNDLES.values():
        for p in P.carrier:
            assert P.division(p, p) == P.right.unit[P.r[p]]
            F = P.fiber(P.l[p])
            for q in F:
                for s in F:
                    assert P.right.mult[(P.division(p, q), P.division(q, s))] == P.division(p, s)
    with pytest.raises(ValueError):
        P = BIBUNDLES["pair_3_to_point"]
        P.division(0, 1)


def test_division_on_bundlization():
    phi = projection(z2_free(), gp.cyclic(2))
    B = gp.bundlization(phi)
    U = phi.target
    for (x, u) in B.carrier:
        for (y, v) in B.fiber(x):
            assert B.division((x, u), (y, v)) == U.mult[(U.inverse[u], v)]


@pytest.mark.parametrize("name", list(BIBUNDLES))
def test_unit_laws(name):
    P = BIBUNDLES[name]
    left = gp.compose(gp.unit_bibundle(P.left), P)
    right = gp.compose(P, gp.unit_bibundle(P.right))
    assert gp.validate(left).ok and gp.validate(right).ok
    assert not gp.isomorphism_violations(left, P, gp.left_unit_map(P, left))
    assert not gp.isomorphism_violations(right, P, gp.right_unit_map(P, right))


def test_id_compose_id():
    I = gp.unit_bibundle(gp.sym3())
    C = gp.compose(I, I)
    assert not gp.isomorphism_violations(C, I, gp.left_unit_map(I, C))


def test_compose_mismatch():
    with pytest.raises(ValueError):
        gp.compose(bibundle("pair_3_to_point"), bibundle("pair_3_to_point"))


@pytest.mark.parametrize("name", list(chains()))
def test_associativity(name):
    P, Q, R = chains()[name]
    PQ, QR = gp.compose(P, Q), gp.compose(Q, R)
    left, right = gp.compose(PQ, R), gp.compose(P, QR)
    assert gp.validate(left).ok and gp.validate(right).ok
    f = gp.associator(left, right, QR)
    assert not gp.isomorphism_violations(left, right, f)


def test_functoriality():
    Z2, S = gp.cyclic(2), gp.sym3()
    phi = projection(z2_free(), Z2)
    psi = gp.GroupoidMorphism(Z2, S, {"*": "*"}, {0: (0, 1, 2), 1: (1, 0, 2)})
    C = gp.compose(gp.bundlization(phi), gp.bundlization(psi))
    target = gp.bundlization(phi.then(psi))
    assert len(C.carrier) == len(target.carrier)
    assert not gp.isomorphism_violations(C, target, gp.functoriality_map(C, psi, target))


def test_isomorphism_check_rejects_non_bijection():
    P = bibundle("pair_3_to_point")
    f = {p: 0 for p in P.carrier}
    assert gp.isomorphism_violations(P, P, f)[0].kind == "not a bijection"


# -- Morita -----------------------------------------------------------------------------


@pytest.mark.parametrize("name", ["unit_pair_3", "unit_sym3", "pair_3_to_point", "z2_free_to_point", "s3_isotropy"])
def test_morita_positive(name):
    rep = gp.is_morita(BIBUNDLES[name])
    assert rep.is_morita and rep.left_iso_ok and rep.right_iso_ok


def test_morita_negative():
    rep = gp.is_morita(bibundle("point_to_units_2"))
    assert not rep.is_morita and rep.violations
    to_pt = gp.bundlization(gp.GroupoidMorphism(gp.cyclic(2), gp.point(), {"*": "*"}, {0: "e", 1: "e"}))
    assert not gp.is_morita(to_pt).is_morita


def test_associated_unit_is_isomorphic():
    S, mods = sym3_modules()
    I = gp.unit_bibundle(S)
    for E in mods.values():
        A = gp.associated_module(I, E)
        T = {x: E.action[A.representatives[x]] for x in S.objects}
        assert gp.is_intertwiner(A.module, E, T)


def test_associated_bundlization_is_pullback():
    Z2 = gp.cyclic(2)
    phi = projection(z2_free(), Z2)
    E = sign_module(Z2)
    A = gp.associated_module(gp.bundlization(phi), E)
    pull = gp.pullback_module(phi, E)
    T = {x: E.action[A.representatives[x][1]] for x in phi.source.objects}
    assert gp.is_intertwiner(A.module, pull, T)


@pytest.mark.parametrize("label,P,E", morita_cases(), ids=[c[0] for c in morita_cases()])
def test_convention_independence(label, P, E):
    a = gp.associated_module(P, E, "smallest")
    b = gp.associated_module(P, E, "largest")
    assert gp.validate(a.module).ok and gp.validate(b.module).ok
    assert gp.is_intertwiner(a.module, b.module, gp.convention_intertwiner(P, E, a, b))


@pytest.mark.parametrize("label,P,E", morita_cases(), ids=[c[0] for c in morita_cases()])
def test_morita_invariance(label, P, E):
    rep = gp.morita_h1_invariance(P, E)
    assert rep.equal and rep.is_morita
    A = gp.associated_module(P, E).module
    for x in P.left.objects:
        assert A.fibers[x] == E.fibers[P.r[gp.associated_module(P, E).representatives[x]]]


def test_morita_negative_control_dims_differ():
    P = bibundle("point_to_units_2")
    rep = gp.morita_invariance(P, gp.trivial_groupoid_module(P.right))
    assert not rep.is_morita and not rep.equal
    assert rep.dims_target[0] == 2 and rep.dims_source[0] == 1
    with pytest.raises(ValueError):
        gp.morita_h1_invariance(P, gp.trivial_groupoid_module(P.right))


@given(st.integers(1, 4), st.integers(1, 3))
def test_pair_groupoid_morita_property(n, d):
    P = to_point(groupoid(f"pair_{n}"))
    rep = gp.morita_invariance(P, gp.trivial_groupoid_module(P.right, d))
    assert rep.equal and rep.dims_target == {0: d, 1: 0}

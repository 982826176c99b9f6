import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from liepair.atiyah import (
    atiyah_class,
    atiyah_cocycle,
    compatible_connection,
    connection_from_matrices,
    curvature_term,
    extend_action,
    is_compatible,
    reductive_certificate,
    reductive_pair,
    semisimple_certificate,
)
from liepair.catalog import example, examples_list
from liepair.cohomology import differential, solve_coboundary
from liepair.lie import LieAlgebra, Representation, adjoint_module, bott_module, make_pair, sl2, trivial_module
from liepair.linalg import DimensionError, Matrix, Subspace, vadd
from liepair.selftest import random_extension

from conftest import small_rationals
from test_cohomology import sl2_std, sl2_sym2


def test_extend_default_so3():
    p = example("so3_so2").pair
    c = extend_action(p)
    assert c.nabla == (Matrix.zeros(2, 2), Matrix.zeros(2, 2), Matrix([[0, -1], [1, 0]]))


def test_extend_default_sl2_borel():
    c = extend_action(example("sl2_borel").pair)
    assert c.nabla == (Matrix([[-2]]), Matrix([[0]]), Matrix([[0]]))


def test_extend_full_subalgebra_is_action():
    g = sl2()
    p = make_pair(g, [(1, 0, 0), (0, 1, 0), (0, 0, 1)])
    c = extend_action(p, adjoint_module(p.h))
    assert c.nabla == adjoint_module(g).action
    r = atiyah_class(p, adjoint_module(p.h))
    assert r.vanishes and r.cocycle.module.dim == 0


def test_extend_wrong_shape():
    p = example("so3_so2").pair
    with pytest.raises(DimensionError):
        extend_action(p, None, [Matrix.zeros(2, 2)])
    with pytest.raises(DimensionError):
        extend_action(p, None, [Matrix.zeros(1, 1), Matrix.zeros(1, 1)])


def test_connection_from_matrices_checks_restriction():
    p = example("sl2_borel").pair
    with pytest.raises(ValueError):
        connection_from_matrices(p, bott_module(p), [Matrix([[0]])] * 3)


def test_sl2_borel_cocycle_by_hand():
    # r(X)(Y) = ∇X∇Y - ∇Y∇X - ∇[X,Y] = -∇H = 2 for the zero extension; r(H)(Y) = -∇[H,Y] - 0 = 2∇Y = 0
    R = atiyah_cocycle(extend_action(example("sl2_borel").pair))
    assert R.coefficients == (0, 2)


def test_so3_cocycle_zero():
    assert atiyah_cocycle(extend_action(example("so3_so2").pair)).is_zero()


@given(st.lists(small_rationals, min_size=8, max_size=8))
def test_heisenberg_any_extension_compatible(vals):
    p = example("heisenberg_center").pair
    c = extend_action(p, None, [Matrix([vals[0:2], vals[2:4]]), Matrix([vals[4:6], vals[6:8]])])
    assert is_compatible(c)


@pytest.mark.parametrize("c", [0, 1, -3, Fraction(1, 2), 7])
def test_sl2_borel_never_compatible(c):
    p = example("sl2_borel").pair
    assert not is_compatible(extend_action(p, None, [Matrix([[c]])]))


def test_atiyah_class_sl2_borel():
    r = atiyah_class(example("sl2_borel").pair)
    assert not r.vanishes and r.h1_dim == 1
    assert r.mu is None and r.compatible is None
    assert r.cocycle.value(1) != (0,)
    j = r.to_json()
    assert set(j) >= {"vanishes", "h1_dim", "cocycle", "mu", "compatible_connection", "certificates", "witnesses"}
    assert j["witnesses"]["inconsistency"]["rank_augmented"] == 2


def test_atiyah_class_so3():
    r = atiyah_class(example("so3_so2").pair)
    assert r.vanishes and r.compatible.nabla == extend_action(example("so3_so2").pair).nabla
    assert "reductive" in r.certificates


def test_reductive_certificates():
    C = reductive_certificate(example("so3_so2").pair)
    assert Subspace.span(C, 3) == Subspace.span([(1, 0, 0), (0, 1, 0)], 3)
    assert reductive_certificate(example("sl2_borel").pair) is None
    A = reductive_certificate(example("abelian_3").pair)
    assert len(A) == 2


def test_reductive_pair_zero_extension_vanishes():
    for e in examples_list():
        rp = reductive_pair(e.pair)
        if rp is not None:
            assert is_compatible(extend_action(rp))


def test_semisimple_certificate():
    assert semisimple_certificate(sl2())
    assert not semisimple_certificate(LieAlgebra.abelian(2))
    assert not semisimple_certificate(example("sl2_borel").pair.h)


@pytest.mark.parametrize("E", [sl2_std(), sl2_sym2(), adjoint_module(sl2()), trivial_module(sl2(), 2)],
                         ids=["std", "sym2", "adjoint", "trivial"])
def test_semisimple_modules_vanish(E):
    p = example("sl2_ltimes_std").pair
    E = Representation(p.h, E.dim, E.action)
    r = atiyah_class(p, E, extend_action(p, E, [Matrix([[1] * E.dim] * E.dim)] * 2))
    assert r.vanishes and "semisimple" in r.certificates
    assert atiyah_cocycle(r.compatible).is_zero()


@pytest.mark.parametrize("name", [e.name for e in examples_list()])
def test_well_defined_modulo_h(name):
    rng = random.Random(name)
    p = example(name).pair
    conn = random_extension(rng, p, bott_module(p))
    for a in p.h_basis:
        for l in p.complement:
            shift = p.h_element([Fraction(rng.randint(-3, 3)) for _ in p.h_basis])
            assert curvature_term(conn, a, l) == curvature_term(conn, a, vadd(l, shift))


@pytest.mark.parametrize("name", [e.name for e in examples_list()])
def test_closed_and_class_independent(name):
    rng = random.Random(f"{name}-2")
    p = example(name).pair
    bott = bott_module(p)
    R0 = atiyah_cocycle(extend_action(p, bott))
    for _ in range(20):
        R = atiyah_cocycle(random_extension(rng, p, bott))
        assert differential(R).is_zero()
        assert solve_coboundary(R - R0) is not None


@pytest.mark.parametrize("name", [e.name for e in examples_list()])
def test_compatible_connection_recomputed(name):
    e = example(name)
    c = compatible_connection(e.pair)
    assert (c is not None) == (e.verdict == "zero")
    if c is not None:
        assert atiyah_cocycle(c).is_zero()
        assert not c.violations()


def test_non_bott_module_on_borel():
    p = example("sl2_borel").pair
    E = trivial_module(p.h)
    assert atiyah_class(p, E).vanishes

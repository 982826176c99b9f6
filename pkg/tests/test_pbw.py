import random
from fractions import Fraction
from itertools import combinations

import pytest

from liepair.atiyah import atiyah_class, compatible_connection, extend_action
from liepair.catalog import example, examples_list
from liepair.envelope import QuotientClass, SymElement, monomial_identification, sym_basis, symmetrize
from liepair.lie import LieAlgebra, bott_module, make_pair
from liepair.linalg import Matrix, rank
from liepair.pbw import SingularPbwMatrix, check_coalgebra, check_equivariance, pbw_build
from liepair.selftest import random_extension


def test_heisenberg_degree_two():
    p = example("heisenberg_center").pair
    pm = pbw_build(p, None, 2)
    assert pm(SymElement(p, {(0, 1): 1})) == QuotientClass(p, {(0, 1): 1})
    assert pm(SymElement(p, {(0,): 1})) == QuotientClass(p, {(0,): 1})
    assert pm(SymElement(p, {(): 1})) == QuotientClass(p, {(): 1})


@pytest.mark.parametrize("name", ["heisenberg_center", "so3_so2"])
def test_properties_through_four(name):
    p = example(name).pair
    pm = pbw_build(p, atiyah_class(p).compatible, 4)
    F = pm.filtered_matrix()
    assert rank(F) == F.rows
    assert pm.is_filtered() and not pm.symbol_defects()
    assert check_coalgebra(pm).ok
    eq = check_equivariance(pm)
    assert eq.ok and eq.first_failing_degree is None


def test_so3_equals_symmetrize():
    p = example("so3_so2").pair
    pm = pbw_build(p, extend_action(p), 4)
    for d in range(5):
        for m in sym_basis(p.q_dim, d):
            s = SymElement(p, {m: 1})
            assert pm(s) == symmetrize(s)


def _abelian_pairs():
    for n in range(1, 5):
        g = LieAlgebra.abelian(n)
        unit = [[1 if k == i else 0 for k in range(n)] for i in range(n)]
        for r in range(n + 1):
            for idx in combinations(range(n), r):
                yield make_pair(g, [unit[i] for i in idx])
        if n >= 2:
            yield make_pair(g, [[1] * n])
            yield make_pair(g, [[1, -1] + [0] * (n - 2)])


def test_abelian_all_h_degree_five():
    count = 0
    for p in _abelian_pairs():
        pm = pbw_build(p, None, 5)
        for d in range(6):
            for m in sym_basis(p.q_dim, d):
                s = SymElement(p, {m: 1})
                assert pm(s) == monomial_identification(s)
        count += 1
    assert count > 20


def test_abelian_nonzero_connection_still_filtered():
    # a non-zero ∇ on the complement changes pbw but keeps identity symbol
    p = example("abelian_3").pair
    conn = extend_action(p, None, [Matrix([[0, 1], [0, 0]]), Matrix([[0, 0], [0, 0]])])
    pm = pbw_build(p, conn, 3)
    assert not pm.symbol_defects()
    s = SymElement(p, {(0, 1): 1})
    assert pm(s) == monomial_identification(s) - QuotientClass(p, {(0,): Fraction(1, 2)})


@pytest.mark.parametrize("c", [0, 1, -1, 2, -3, Fraction(1, 2), 5])
def test_sl2_borel_equivariance_fails(c):
    p = example("sl2_borel").pair
    pm = pbw_build(p, extend_action(p, None, [Matrix([[c]])]), 2)
    eq = check_equivariance(pm)
    assert not eq.ok and eq.first_failing_degree <= 2
    assert check_coalgebra(pm).ok


@pytest.mark.parametrize("name", [e.name for e in examples_list() if e.verdict == "zero"])
def test_compatible_implies_equivariant(name):
    p = example(name).pair
    c = compatible_connection(p)
    assert check_equivariance(pbw_build(p, c, 3)).ok


@pytest.mark.parametrize("name", [e.name for e in examples_list()])
def test_coalgebra_for_random_extensions(name):
    rng = random.Random(name)
    p = example(name).pair
    for _ in range(3):
        pm = pbw_build(p, random_extension(rng, p, bott_module(p)), 3)
        assert check_coalgebra(pm).ok


def test_h_equals_g_vacuous():
    g = example("so3_so2").pair.g
    p = make_pair(g, [(1, 0, 0), (0, 1, 0), (0, 0, 1)])
    pm = pbw_build(p, None, 3)
    assert check_equivariance(pm).ok and check_coalgebra(pm).ok
    assert all(M.rows == 1 or M.cols == 0 for M in pm.matrices.values())


def test_bad_inputs():
    p = example("so3_so2").pair
    with pytest.raises(ValueError):
        pbw_build(p, None, 0)
    b = example("sl2_borel").pair
    with pytest.raises(ValueError):
        pbw_build(p, extend_action(b), 2)


def test_singular_error_type():
    assert issubclass(SingularPbwMatrix, ArithmeticError)


def test_matrix_shapes_and_json():
    p = example("heisenberg_center").pair
    pm = pbw_build(p, None, 3)
    from math import comb
    for d, M in pm.matrices.items():
        assert M.cols == comb(p.q_dim + d - 1, d)
        assert M.rows == sum(comb(p.q_dim + e - 1, e) for e in range(d + 1))
    j = pm.to_json()
    assert j["matrices"]["2"]["cols"] == [[0, 0], [0, 1], [1, 1]]

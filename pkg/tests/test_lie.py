from itertools import combinations

import pytest
import sympy
from hypothesis import given, strategies as st

from liepair.catalog import example, examples_list, pair_names
from liepair.lie import (
    BadComplement,
    LieAlgebra,
    LiePairError,
    NotAModule,
    NotASubalgebra,
    Representation,
    adjoint_module,
    bott_module,
    change_of_section,
    direct_sum,
    heisenberg,
    make_pair,
    matched_pair_check,
    semidirect,
    sl2,
    so3,
    validate_algebra,
)
from liepair.linalg import Matrix

from conftest import small_rationals


def jacobi_oracle(dim, brackets):
    """Cyclic Jacobi sums with sympy, straight from the structure constants."""
    c = [[sympy.zeros(dim, 1) for _ in range(dim)] for _ in range(dim)]
    for (i, j), v in brackets.items():
        c[i][j] = sympy.Matrix(v)
        c[j][i] = -sympy.Matrix(v)

    def br(u, w):
        out = sympy.zeros(dim, 1)
        for i in range(dim):
            for j in range(dim):
                out += u[i] * w[j] * c[i][j]
        return out

    e = [sympy.eye(dim)[:, k] for k in range(dim)]
    bad = []
    for i, j, k in combinations(range(dim), 3):
        s = br(e[i], br(e[j], e[k])) + br(e[j], br(e[k], e[i])) + br(e[k], br(e[i], e[j]))
        if s != sympy.zeros(dim, 1):
            bad.append((i, j, k))
    return bad


def test_abelian_valid():
    assert validate_algebra(LieAlgebra.abelian(4)) == []


def test_sl2_valid():
    assert validate_algebra(sl2()) == []


def test_jacobi_violation_reported():
    brackets = {(0, 1): (1, 0, 0), (0, 2): (0, 0, 1), (1, 2): (0, 0, 0)}
    assert jacobi_oracle(3, brackets) == [(0, 1, 2)]
    g = LieAlgebra.from_brackets(3, brackets)
    bad = validate_algebra(g)
    assert [v.kind for v in bad] == ["jacobi"]
    assert tuple(bad[0].where) == (0, 1, 2)


def test_make_pair_sl2_borel_complement():
    p = make_pair(sl2(), [(1, 0, 0), (0, 1, 0)])
    assert p.complement == ((0, 0, 1),)
    assert p.q_dim == 1


def test_make_pair_full_subalgebra():
    g = sl2()
    p = make_pair(g, [(1, 0, 0), (0, 1, 0), (0, 0, 1)])
    assert p.q_dim == 0


def test_not_a_subalgebra_witness():
    with pytest.raises(NotASubalgebra) as info:
        make_pair(sl2(), [(0, 1, 0), (0, 0, 1)])
    assert info.value.witness == (0, 1)
    assert info.value.bracket == (1, 0, 0)


def test_bad_complement():
    with pytest.raises(BadComplement):
        make_pair(sl2(), [(1, 0, 0)], [(1, 0, 0), (0, 1, 0)])
    with pytest.raises(BadComplement):
        make_pair(sl2(), [(1, 0, 0)], [(0, 1, 0)])


def test_dependent_h_rejected():
    with pytest.raises(LiePairError):
        make_pair(sl2(), [(1, 0, 0), (2, 0, 0)])


def test_bott_sl2_borel():
    b = bott_module(make_pair(sl2(), [(1, 0, 0), (0, 1, 0)]))
    assert b.action == (Matrix([[-2]]), Matrix([[0]]))


def test_bott_abelian_zero():
    p = example("abelian_4").pair
    assert all(M.is_zero() for M in bott_module(p).action)


def test_bott_so3_rotation():
    b = bott_module(make_pair(so3(), [(0, 0, 1)]))
    assert b.action == (Matrix([[0, -1], [1, 0]]),)


def test_killing_sl2_oracle():
    g = sl2()
    ads = [sympy.Matrix([[g.table[i][j][k] for j in range(3)] for k in range(3)]) for i in range(3)]
    K = sympy.Matrix(3, 3, lambda a, b: (ads[a] * ads[b]).trace())
    assert K.det() == -128
    assert g.killing_form().det() == -128


def test_semidirect_identity_action():
    acting = LieAlgebra.abelian(1)
    ideal = LieAlgebra.abelian(2)
    g = semidirect(acting, ideal, [Matrix.identity(2)])
    assert g.dim == 3 and validate_algebra(g) == []
    assert g.bracket((1, 0, 0), (0, 1, 0)) == (0, 1, 0)


def test_semidirect_rejects_non_derivation():
    acting = LieAlgebra.abelian(1)
    with pytest.raises(ValueError):
        semidirect(acting, heisenberg(), [Matrix([[1, 0, 0], [0, 0, 0], [0, 0, 0]])])


def test_direct_sum_abelian_valid():
    g = direct_sum(LieAlgebra.abelian(2), LieAlgebra.abelian(1))
    assert g.is_abelian() and validate_algebra(g) == []


def test_matched_pair_sl2():
    rep = matched_pair_check(sl2(), [(1, 0, 0), (0, 1, 0)], [(0, 0, 1)])
    assert rep.ok
    bad = matched_pair_check(sl2(), [(0, 1, 0), (0, 0, 1)], [(1, 0, 0)])
    assert not bad.ok and bad.violations[0].kind == "not_closed"


def test_flatness_rejects_bad_action():
    h = sl2()
    rep = Representation(h, 1, (Matrix([[1]]), Matrix([[1]]), Matrix([[0]])))
    assert not rep.is_flat()
    with pytest.raises(NotAModule):
        rep.checked()


def test_adjoint_is_flat():
    assert adjoint_module(sl2()).is_flat()


@pytest.mark.parametrize("name", [e.name for e in examples_list()])
def test_catalog_entry_valid(name):
    e = example(name)
    assert validate_algebra(e.pair.g) == []
    assert bott_module(e.pair).is_flat()
    hs = e.pair.h_space
    for a, b in combinations(e.pair.h_basis, 2):
        assert hs.contains(e.pair.g.bracket(a, b))


@pytest.mark.parametrize("name", [e.name for e in examples_list() if e.alternative_complements])
def test_bott_independent_of_complement(name):
    e = example(name)
    for alt in e.alternative_complements:
        other = e.pair.with_complement(alt)
        C = change_of_section(e.pair, other)
        A, B = bott_module(e.pair).action, bott_module(other).action
        for a, b in zip(A, B):
            assert C @ a == b @ C


def test_unknown_catalog_name():
    with pytest.raises(KeyError):
        example("nope")
    assert "sl2_borel" in pair_names()


@given(st.lists(small_rationals, min_size=9, max_size=9))
def test_change_basis_preserves_axioms(entries):
    P = Matrix([entries[0:3], entries[3:6], entries[6:9]])
    if P.det() == 0:
        return
    for g in (sl2(), so3(), heisenberg()):
        h = g.change_basis(P.columns())
        assert validate_algebra(h) == []
        assert (h.killing_form().det() == 0) == (g.killing_form().det() == 0)

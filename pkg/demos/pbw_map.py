"""The PBW map S(g/h) -> U(g)/U(g)h built from a connection, and what it detects."""

from fractions import Fraction

from liepair import Matrix, SymElement, check_coalgebra, check_equivariance, example, pbw_build, symmetrize
from liepair.atiyah import atiyah_class, extend_action
from liepair.envelope import sym_basis

if __name__ == "__main__":
    h = example("heisenberg_center").pair
    pm = pbw_build(h, None, 3)
    print("heisenberg, h = center:")
    for m in sym_basis(h.q_dim, 2):
        s = SymElement(h, {m: 1})
        print(f"  pbw({s}) = {pm(s)}")

    p = example("so3_so2").pair
    pm = pbw_build(p, atiyah_class(p).compatible, 4)
    same = all(pm(SymElement(p, {m: 1})) == symmetrize(SymElement(p, {m: 1}))
               for d in range(5) for m in sym_basis(p.q_dim, d))
    print(f"\nso3 over so2: pbw equals symmetrization through degree 4: {same}")
    print(f"  coalgebra map: {check_coalgebra(pm).ok}, equivariant: {check_equivariance(pm).ok}")
    print("  degree-2 matrix (rows: normal monomials, columns: symmetric monomials):")
    for row in pm.matrices[2].to_strings():
        print("   ", row)

    b = example("sl2_borel").pair
    print("\nsl2 over its Borel subalgebra: no compatible connection exists")
    for c in (0, 1, Fraction(-1, 2)):
        pm = pbw_build(b, extend_action(b, None, [Matrix([[c]])]), 3)
        eq = check_equivariance(pm)
        print(f"  ∇_Y = {c}: coalgebra {check_coalgebra(pm).ok}, equivariance {eq.ok} "
              f"(first failure in degree {eq.first_failing_degree})")

"""Finite groupoids: cohomology, bibundles, and invariance under Morita equivalence."""

from liepair import groupoid as gp
from liepair.catalog import bibundle, groupoid, z2_free
from liepair.io import sign_module

if __name__ == "__main__":
    for name in ("pair_3", "sym3", "z2_free"):
        G = groupoid(name)
        H = gp.groupoid_cohomology(G, gp.trivial_groupoid_module(G))
        print(f"{name}: {len(G.objects)} objects, {len(G.arrows)} arrows, "
              f"H^0..2 = {[H.h(n) for n in range(3)]}, ∂∂ = 0: {H.square_zero}")
    Z2 = gp.cyclic(2)
    print(f"Z/2 with the sign module: H^0..2 = {[gp.groupoid_cohomology(Z2, sign_module(Z2)).h(n) for n in range(3)]}")

    # the pair groupoid on three points is Morita equivalent to a point
    P = bibundle("pair_3_to_point")
    m = gp.is_morita(P)
    print(f"\n{P}: Morita = {m.is_morita}")
    back = gp.compose(P, m.inverse)
    print(f"  P∘P^op has {len(back.carrier)} points, isomorphic to Id: {m.left_iso_ok}")
    E = gp.trivial_groupoid_module(P.right, 2)
    inv = gp.morita_invariance(P, E)
    print(f"  H dims over the point {inv.dims_target}, over pair_3 with induced module {inv.dims_source}")

    # the free Z/2 action on two points against its quotient
    Q = gp.isotropy_bibundle(z2_free(), 0)
    print(f"\n{Q}: Morita = {gp.is_morita(Q).is_morita}")

    # including a point into two disjoint points is not essentially surjective
    N = bibundle("point_to_units_2")
    rep = gp.morita_invariance(N, gp.trivial_groupoid_module(N.right))
    first = gp.is_morita(N).violations[0]
    print(f"\n{N}: Morita = {rep.is_morita}, first obstruction '{first.kind}' at {first.witness}")
    print(f"  H dims differ: {rep.dims_source} vs {rep.dims_target}")

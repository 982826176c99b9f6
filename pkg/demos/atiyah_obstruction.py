"""When does a Lie pair admit an h-compatible connection on g/h?

Runs the Atiyah-class solver on three pairs with different answers and shows
the data that certifies each answer.
"""

from liepair import atiyah_class, example, extend_action, reductive_certificate
from liepair.atiyah import atiyah_cocycle


def show(name):
    pair = example(name).pair
    report = atiyah_class(pair)
    print(f"== {name}: g = {pair.g.name}, dim h = {pair.h_dim}")
    print(f"   cocycle of the default extension: {report.cocycle.to_json()['coefficients']}")
    print(f"   dim H^1(h, W) = {report.h1_dim}")
    if report.vanishes:
        nabla = report.compatible
        print("   class vanishes; compatible connection on the complement:")
        for b, M in zip(pair.complement, (nabla.at(b) for b in pair.complement)):
            print(f"     ∇ at {tuple(map(str, b))}: {M.to_strings()}")
        print(f"   recomputed cocycle is zero: {atiyah_cocycle(nabla).is_zero()}")
    else:
        w = report.witness
        print("   class does not vanish; left-kernel witness:")
        print(f"     y = {[str(c) for c in w.functional]}, y·R = {w.pairing}, "
              f"rank d0 = {w.rank_d0}, rank [d0 | R] = {w.rank_augmented}")
    cert = reductive_certificate(pair)
    print(f"   invariant complement: {None if cert is None else [tuple(map(str, v)) for v in cert]}")
    print()


if __name__ == "__main__":
    # reductive: the zero extension already works
    show("so3_so2")
    # the Borel subalgebra of sl2: a genuine obstruction
    show("sl2_borel")
    # no invariant complement, yet the class is a coboundary
    show("matched_sl2")

    # any other extension on the Borel pair moves R only by a coboundary
    pair = example("sl2_borel").pair
    from liepair import Matrix
    for c in (0, 1, -2):
        R = atiyah_cocycle(extend_action(pair, None, [Matrix([[c]])]))
        print(f"sl2_borel with ∇_Y = {c}: R = {[str(x) for x in R.coefficients]}")

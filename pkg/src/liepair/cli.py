"""``liepair`` command-line front end.

Exit codes: 0 when the computation ran (whatever the mathematical answer),
1 for invalid input, 2 when a mathematical precondition fails.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path
from typing import Any

from . import groupoid as gp
from . import io
from .atiyah import atiyah_class, reductive_certificate
from .catalog import examples_list, pair_names
from .cohomology import h_dim
from .lie import bott_module, validate_algebra
from .pbw import SingularPbwMatrix, check_coalgebra, check_equivariance, pbw_build
from .selftest import Check, run_selftest


class PreconditionFailure(Exception):
    def __init__(self, message: str, result: dict | None = None):
        super().__init__(message)
        self.result = result or {}


class Report:
    def __init__(self, argv: list[str]):
        self.command = list(argv)
        self.inputs: dict[str, dict] = {}
        self.result: dict = {}
        self.checks: list[Check] = []
        self.summary: list[str] = []
        self.error: dict | None = None
        self._t0 = time.perf_counter()

    def record_input(self, role: str, spec) -> None:
        if spec is None:
            return
        _, kind, digest = io.load_source(spec)
        self.inputs[role] = {"source": str(spec), "kind": kind, "sha256": digest}

    def check(self, name: str, ok: bool, witness: Any = None) -> None:
        self.checks.append(Check(name, bool(ok), witness))

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "inputs": self.inputs,
            "result": self.result,
            "checks": [c.to_json() for c in self.checks],
            "error": self.error,
            "timing": {"seconds": round(time.perf_counter() - self._t0, 6)},
        }


# -- Lie commands ------------------------------------------------------------------------


def _pair_and_module(args, rep: Report):
    rep.record_input("pair", args.pair)
    pair, entry = io.load_pair(args.pair)
    module = None
    if getattr(args, "module", None):
        rep.record_input("module", args.module)
        module = io.load_module(args.module, pair)
    return pair, entry, module


def cmd_check(args, rep: Report) -> None:
    if args.algebra:
        rep.record_input("algebra", args.algebra)
        data, kind, _ = io.load_source(args.algebra)
        g = io.load_pair(args.algebra)[0].g if kind == "catalog" else io.algebra_from_json(data)
        bad = validate_algebra(g)
        rep.check("lie algebra axioms", not bad, [b.kind for b in bad[:1]])
        rep.result = {"algebra": io.algebra_to_json(g)}
        rep.summary.append(f"algebra {g.name or ''} of dim {g.dim}: valid")
        return
    if not args.pair:
        raise io.InputError("check needs --pair or --algebra")
    pair, entry, module = _pair_and_module(args, rep)
    rep.check("lie algebra axioms", not validate_algebra(pair.g))
    rep.check("subalgebra closed", True)
    bott = bott_module(pair)
    rep.check("bott module flat", bott.is_flat())
    out = {"pair": io.pair_to_json(pair), "bott_action": [M.to_strings() for M in bott.action]}
    if module is not None:
        rep.check("module flat", module.is_flat())
        out["module_dim"] = module.dim
    if args.connection:
        rep.record_input("connection", args.connection)
        conn = io.load_connection(args.connection, pair, module or bott)
        rep.check("connection extends action", not conn.violations())
    rep.result = out
    rep.summary.append(f"{pair.name}: dim g = {pair.g.dim}, dim h = {pair.h_dim}; all checks pass")


def cmd_atiyah(args, rep: Report) -> None:
    pair, entry, module = _pair_and_module(args, rep)
    module = module or bott_module(pair)
    conn = None
    if args.connection:
        rep.record_input("connection", args.connection)
        conn = io.load_connection(args.connection, pair, module)
    r = atiyah_class(pair, module, conn)
    rep.result = r.to_json()
    rep.result["complement"] = [[str(c) for c in b] for b in pair.complement]
    rep.check("cocycle closed", True)
    if r.vanishes:
        rep.check("compatible connection has zero cocycle", True)
    else:
        w = r.witness
        rep.check("inconsistency witness", w is not None and w.pairing != 0 and w.rank_augmented > w.rank_d0,
                  w.to_json() if w else None)
    verdict = "vanishes" if r.vanishes else "does not vanish"
    rep.summary.append(f"Atiyah class of {pair.name} {verdict}; dim H^1 of coefficients = {r.h1_dim}")
    if r.certificates:
        rep.summary.append("certificates: " + ", ".join(r.certificates))


def cmd_pbw(args, rep: Report) -> None:
    pair, entry, _ = _pair_and_module(args, rep)
    bott = bott_module(pair)
    if args.connection:
        rep.record_input("connection", args.connection)
        conn = io.load_connection(args.connection, pair, bott)
        source = "supplied"
    else:
        a = atiyah_class(pair, bott)
        if not a.vanishes:
            raise PreconditionFailure(
                "no compatible connection exists: the Atiyah class of the pair is nonzero; "
                "supply --connection to build the map for a non-compatible extension",
                {"atiyah": a.to_json()},
            )
        conn, source = a.compatible, "compatible (from the Atiyah solver)"
    try:
        pm = pbw_build(pair, conn, args.degree)
    except SingularPbwMatrix as exc:
        raise PreconditionFailure(str(exc)) from None
    co, eq = check_coalgebra(pm), check_equivariance(pm)
    rep.result = {"connection_source": source, "connection": conn.to_json(), "pbw": pm.to_json(),
                  "coalgebra": co.to_json(), "equivariance": eq.to_json()}
    rep.check("per-degree matrices invertible", True)
    rep.check("symbol is identity", not pm.symbol_defects())
    rep.check("coalgebra morphism", co.ok, co.first_failure)
    rep.check("equivariance", eq.ok, eq.failures[:3] or None)
    rep.summary.append(f"PBW map of {pair.name} through degree {args.degree}: "
                       f"coalgebra {'pass' if co.ok else 'FAIL'}, equivariance {'pass' if eq.ok else 'FAIL'}")


def cmd_cohomology(args, rep: Report) -> None:
    pair, entry, module = _pair_and_module(args, rep)
    module = module or bott_module(pair)
    dims = {"H0": h_dim(0, module), "H1": h_dim(1, module)}
    rep.result = {"module_dim": module.dim, **dims}
    rep.summary.append(f"h-cohomology of the module: H^0 = {dims['H0']}, H^1 = {dims['H1']}")


def cmd_examples(args, rep: Report) -> None:
    entries = []
    for e in examples_list():
        verdict = "class zero" if e.verdict == "zero" else "class nonzero"
        tag = "reductive, " if reductive_certificate(e.pair) is not None else ""
        name = "abelian_n" if e.name.startswith("abelian_") else e.name
        line = f"{name}: {tag}{verdict}"
        entries.append({"name": name, "dim_g": e.pair.g.dim, "dim_h": e.pair.h_dim,
                        "verdict": verdict, "reductive": bool(tag), "derivation": e.derivation})
        rep.summary.append(f"{line}  (dim g = {e.pair.g.dim}, dim h = {e.pair.h_dim}) {e.derivation}")
    rep.result = {"pairs": entries, "names": pair_names(),
                  "groupoids": ["pair_N", "cyclic_N", "units_N", "sym3", "point", "z2_free"],
                  "bibundles": ["pair_N_to_point", "z2_free_to_point", "unit_<groupoid>", "point_to_units_2"]}


def cmd_selftest(args, rep: Report) -> None:
    for c in run_selftest():
        rep.checks.append(c)
        rep.summary.append(f"{'PASS' if c.ok else 'FAIL'}  {c.name}")
    rep.result = {"passed": sum(c.ok for c in rep.checks), "total": len(rep.checks)}


# -- groupoid commands -------------------------------------------------------------------


def cmd_gpd_validate(args, rep: Report) -> None:
    if args.bibundle:
        rep.record_input("bibundle", args.bibundle)
        obj, what = io.load_bibundle(args.bibundle), "bibundle"
    elif args.morphism:
        rep.record_input("morphism", args.morphism)
        obj, what = io.morphism_from_json(io.load_source(args.morphism)[0]), "morphism"
    elif args.groupoid:
        rep.record_input("groupoid", args.groupoid)
        obj, what = io.load_groupoid(args.groupoid), "groupoid"
        if args.module:
            rep.record_input("module", args.module)
            obj, what = io.load_groupoid_module(args.module, obj), "module"
    else:
        raise io.InputError("gpd validate needs --groupoid, --bibundle or --morphism")
    v = gp.validate(obj)
    rep.result = {"object": what, **v.to_json()}
    rep.check(f"{what} axioms", v.ok, v.violations[0].to_json() if v.violations else None)
    rep.summary.append(f"{what}: {'valid' if v.ok else 'INVALID'}")


def cmd_gpd_cohomology(args, rep: Report) -> None:
    rep.record_input("groupoid", args.groupoid)
    G = io.load_groupoid(args.groupoid)
    rep.record_input("module", args.module)
    E = io.load_groupoid_module(args.module, G)
    c = gp.groupoid_cohomology(G, E, args.top)
    rep.result = c.to_json()
    rep.check("boundaries square to zero", c.square_zero)
    rep.summary.append("  ".join(f"H^{n} = {h}" for n, (_, _, h) in c.dims.items()))


def cmd_gpd_compose(args, rep: Report) -> None:
    rep.record_input("first", args.first)
    rep.record_input("second", args.second)
    P, Q = io.load_bibundle(args.first), io.load_bibundle(args.second)
    try:
        C = gp.compose(P, Q)
    except ValueError as exc:
        raise io.InputError(str(exc)) from None
    v = C.violations()
    rep.check("composite is a generalized morphism", not v, v[0].to_json() if v else None)
    IdL = gp.unit_bibundle(P.left)
    left = gp.compose(IdL, C)
    lv = gp.isomorphism_violations(left, C, gp.left_unit_map(C, left))
    rep.check("left unit law", not lv, lv[0].to_json() if lv else None)
    IdU = gp.unit_bibundle(C.right)
    right = gp.compose(C, IdU)
    rv = gp.isomorphism_violations(right, C, gp.right_unit_map(C, right))
    rep.check("right unit law", not rv, rv[0].to_json() if rv else None)
    rep.result = {"composite": io.bibundle_to_json(C), "carrier_size": len(C.carrier),
                  "representative": "smallest label pair"}
    rep.summary.append(f"composite carrier has {len(C.carrier)} points")


def cmd_gpd_morita(args, rep: Report) -> None:
    rep.record_input("bibundle", args.bibundle)
    P = io.load_bibundle(args.bibundle)
    m = gp.is_morita(P)
    rep.result = m.to_json()
    if m.is_morita:
        rep.check("P∘P^op ≅ Id", m.left_iso_ok)
        rep.check("P^op∘P ≅ Id", m.right_iso_ok)
    rep.summary.append(f"Morita: {m.is_morita}")
    if not m.is_morita and m.violations:
        rep.summary.append(f"first obstruction: {m.violations[0].kind} at {m.violations[0].witness}")


def cmd_gpd_associate(args, rep: Report) -> None:
    rep.record_input("bibundle", args.bibundle)
    P = io.load_bibundle(args.bibundle)
    rep.record_input("module", args.module)
    E = io.load_groupoid_module(args.module, P.right)
    a = gp.associated_module(P, E, "smallest")
    b = gp.associated_module(P, E, "largest")
    T = gp.convention_intertwiner(P, E, a, b)
    rep.check("associated module valid", not a.module.violations())
    rep.check("independent of representative convention", gp.is_intertwiner(a.module, b.module, T))
    inv = gp.morita_invariance(P, E)
    if inv.is_morita:
        rep.check("cohomology dims preserved", inv.equal, inv.to_json())
    rep.result = {"module": io.groupoid_module_to_json(a.module),
                  "representatives": {io.label_str(x): io.label_str(p) for x, p in a.representatives.items()},
                  "convention": "smallest label", "invariance": inv.to_json()}
    rep.summary.append(f"associated module over {P.left.name}: fibers "
                       + ", ".join(f"{io.label_str(x)}:{d}" for x, d in a.module.fibers.items()))
    rep.summary.append(f"H^0/H^1 dims {inv.dims_source} vs {inv.dims_target} (Morita: {inv.is_morita})")


# -- entry point -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="liepair", description="Exact Atiyah classes, PBW maps and finite groupoid tools.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the JSON report to this file")
    common.add_argument("--json", action="store_true", help="print the full JSON report")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="validate an algebra, pair, module or connection")
    p.add_argument("--algebra")
    p.add_argument("--pair")
    p.add_argument("--module")
    p.add_argument("--connection")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("atiyah", parents=[common], help="Atiyah class of a pair and module")
    p.add_argument("--pair", required=True)
    p.add_argument("--module")
    p.add_argument("--connection")
    p.set_defaults(fn=cmd_atiyah)

    p = sub.add_parser("pbw", parents=[common], help="PBW map through a given degree")
    p.add_argument("--pair", required=True)
    p.add_argument("--connection")
    p.add_argument("--degree", type=int, default=4)
    p.set_defaults(fn=cmd_pbw)

    p = sub.add_parser("cohomology", parents=[common], help="H^0 and H^1 of h with coefficients")
    p.add_argument("--pair", required=True)
    p.add_argument("--module")
    p.set_defaults(fn=cmd_cohomology)

    p = sub.add_parser("examples", parents=[common], help="list the built-in catalog")
    p.set_defaults(fn=cmd_examples)

    p = sub.add_parser("selftest", parents=[common], help="run the invariant suite")
    p.set_defaults(fn=cmd_selftest)

    g = sub.add_parser("gpd", help="finite groupoid tools")
    gsub = g.add_subparsers(dest="gpd_command", required=True)
    q = gsub.add_parser("validate", parents=[common])
    q.add_argument("--groupoid")
    q.add_argument("--module")
    q.add_argument("--bibundle")
    q.add_argument("--morphism")
    q.set_defaults(fn=cmd_gpd_validate)
    q = gsub.add_parser("cohomology", parents=[common])
    q.add_argument("--groupoid", required=True)
    q.add_argument("--module", default="trivial")
    q.add_argument("--top", type=int, default=2, choices=[0, 1, 2])
    q.set_defaults(fn=cmd_gpd_cohomology)
    q = gsub.add_parser("compose", parents=[common])
    q.add_argument("first")
    q.add_argument("second")
    q.set_defaults(fn=cmd_gpd_compose)
    q = gsub.add_parser("morita", parents=[common])
    q.add_argument("--bibundle", required=True)
    q.set_defaults(fn=cmd_gpd_morita)
    q = gsub.add_parser("associate", parents=[common])
    q.add_argument("--bibundle", required=True)
    q.add_argument("--module", default="trivial")
    q.set_defaults(fn=cmd_gpd_associate)
    return ap


def run(argv: list[str] | None = None) -> tuple[int, dict]:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(argv)
    rep = Report(argv)
    code = 0
    try:
        args.fn(args, rep)
    except io.InputError as exc:
        code = 1
        rep.error = {"kind": "invalid input", "message": str(exc), "first_violation": exc.detail}
        rep.summary.append(f"invalid input: {exc}")
    except PreconditionFailure as exc:
        code = 2
        rep.result.update(exc.result)
        rep.error = {"kind": "precondition", "message": str(exc)}
        rep.summary.append(f"precondition failure: {exc}")
    except ValueError as exc:
        code = 1
        rep.error = {"kind": "invalid input", "message": str(exc)}
        rep.summary.append(f"invalid input: {exc}")
    if args.command == "selftest" and not all(c.ok for c in rep.checks):
        code = code or 1
    payload = rep.to_json()
    if getattr(args, "out", None):
        Path(args.out).write_text(json.dumps(payload, indent=2, ensure_ascii=False) + "\n")
    if getattr(args, "json", False):
        print(json.dumps(payload, indent=2, ensure_ascii=False))
    else:
        for line in rep.summary:
            print(line)
    return code, payload


def main(argv: list[str] | None = None) -> int:
    return run(argv)[0]


if __name__ == "__main__":
    sys.exit(main())

"""JSON readers and writers for algebras, pairs, modules, connections, groupoids and bibundles.

Basis indices are 0-based throughout.  Rationals are written ``"p/q"``.
Anywhere a file is expected, a catalog name is accepted as well.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any

from . import catalog
from . import groupoid as gp
from .atiyah import ConnectionExtension, connection_from_matrices, extend_action
from .lie import (
    LieAlgebra,
    LiePair,
    NotAModule,
    NotASubalgebra,
    Representation,
    make_pair,
    validate_algebra,
)
from .linalg import Matrix, format_rational


class InputError(ValueError):
    """Malformed or invalid input; ``detail`` names the first violated axiom when there is one."""

    def __init__(self, message: str, detail: Any = None):
        super().__init__(message)
        self.detail = detail


def load_source(spec: str | Path | dict) -> tuple[Any, str, str]:
    """Return ``(data, kind, digest)``; ``kind`` is ``"catalog"``, ``"file"`` or ``"inline"``."""
    if isinstance(spec, dict):
        raw = json.dumps(spec, sort_keys=True).encode()
        return spec, "inline", hashlib.sha256(raw).hexdigest()
    p = Path(spec)
    if p.is_file():
        raw = p.read_bytes()
        try:
            data = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise InputError(f"{spec}: not valid JSON ({exc})") from None
        return data, "file", hashlib.sha256(raw).hexdigest()
    return str(spec), "catalog", hashlib.sha256(str(spec).encode()).hexdigest()


def _matrix(rows, m: int | None = None) -> Matrix:
    try:
        M = Matrix(rows, cols=m if not rows else None)
    except (TypeError, ValueError) as exc:
        raise InputError(f"bad matrix {rows!r}: {exc}") from None
    if m is not None and M.shape != (m, m):
        raise InputError(f"matrix of shape {M.shape}, expected ({m}, {m})")
    return M


# -- Lie side ----------------------------------------------------------------------------


def algebra_from_json(data: dict, base: Path | None = None) -> LieAlgebra:
    try:
        dim = int(data["dim"])
        names = data.get("basis")
        brackets = {}
        for key, value in data.get("brackets", {}).items():
            i, j = (int(t) for t in key.split(","))
            if not (0 <= i < j < dim):
                raise InputError(f"bracket key {key!r} must satisfy 0 <= i < j < dim")
            brackets[(i, j)] = {int(k): v for k, v in value.items()} if isinstance(value, dict) else value
        g = LieAlgebra.from_brackets(dim, brackets, names, data.get("name", ""))
    except InputError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed Lie algebra: {exc}") from None
    bad = validate_algebra(g)
    if bad:
        raise InputError("not a Lie algebra", {"kind": bad[0].kind, "where": list(bad[0].where)})
    return g


def algebra_to_json(g: LieAlgebra) -> dict:
    brackets = {}
    for i in range(g.dim):
        for j in range(i + 1, g.dim):
            v = {str(k): format_rational(c) for k, c in enumerate(g.table[i][j]) if c}
            if v:
                brackets[f"{i},{j}"] = v
    return {"name": g.name, "dim": g.dim, "basis": list(g.basis_names), "brackets": brackets}


def load_pair(spec) -> tuple[LiePair, catalog.CatalogEntry | None]:
    data, kind, _ = load_source(spec)
    if kind == "catalog":
        try:
            entry = catalog.example(data)
        except KeyError as exc:
            raise InputError(str(exc.args[0])) from None
        return entry.pair, entry
    base = Path(spec).parent if kind == "file" else None
    return pair_from_json(data, base), None


def pair_from_json(data: dict, base: Path | None = None) -> LiePair:
    try:
        alg = data["algebra"]
        sub = data["subalgebra"]
    except (KeyError, TypeError):
        raise InputError("pair file needs 'algebra' and 'subalgebra'") from None
    if isinstance(alg, str):
        path = (base / alg) if base is not None else Path(alg)
        if path.is_file():
            g = algebra_from_json(json.loads(path.read_text()))
        else:
            try:
                g = catalog.example(alg).pair.g
            except KeyError:
                raise InputError(f"algebra {alg!r} is neither a file nor a catalog pair") from None
    else:
        g = algebra_from_json(alg)
    try:
        return make_pair(g, sub, data.get("complement"), data.get("name", ""))
    except ValueError as exc:
        detail = None
        if isinstance(exc, NotASubalgebra):
            detail = {"kind": "not a subalgebra", "witness": list(exc.witness),
                      "bracket": [format_rational(c) for c in exc.bracket]}
        raise InputError(str(exc), detail) from None


def pair_to_json(p: LiePair) -> dict:
    return {
        "name": p.name,
        "algebra": algebra_to_json(p.g),
        "subalgebra": [[format_rational(c) for c in v] for v in p.h_basis],
        "complement": [[format_rational(c) for c in v] for v in p.complement],
    }


def load_module(spec, pair: LiePair) -> Representation:
    data, kind, _ = load_source(spec)
    if kind == "catalog":
        raise InputError(f"module file {spec!r} not found")
    return module_from_json(data, pair)


def module_from_json(data: dict, pair: LiePair) -> Representation:
    try:
        m = int(data["dim"])
        action = tuple(_matrix(a, m) for a in data["action"])
        rep = Representation(pair.h, m, action, data.get("name", ""))
    except InputError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed module: {exc}") from None
    try:
        return rep.checked()
    except NotAModule as exc:
        v = exc.violations[0]
        raise InputError("module action is not flat", {"kind": v.kind, "where": list(v.where)}) from None


def module_to_json(rep: Representation) -> dict:
    return {"dim": rep.dim, "action": [M.to_strings() for M in rep.action]}


def load_connection(spec, pair: LiePair, module: Representation) -> ConnectionExtension:
    data, kind, _ = load_source(spec)
    if kind == "catalog":
        raise InputError(f"connection file {spec!r} not found")
    return connection_from_json(data, pair, module)


def connection_from_json(data: dict, pair: LiePair, module: Representation) -> ConnectionExtension:
    """``{"nabla": [matrix per g basis vector]}`` or ``{"complement_values": [matrix per complement vector]}``."""
    m = module.dim
    try:
        if "nabla" in data:
            return connection_from_matrices(pair, module, [_matrix(a, m) for a in data["nabla"]])
        if "complement_values" in data:
            return extend_action(pair, module, [_matrix(a, m) for a in data["complement_values"]])
    except InputError:
        raise
    except ValueError as exc:
        raise InputError(f"bad connection: {exc}") from None
    raise InputError("connection file needs 'nabla' or 'complement_values'")


# -- groupoid side -----------------------------------------------------------------------


def label_str(x) -> str:
    """String form of a label; tuples use ``;`` so that ``"a,b"`` keys stay unambiguous."""
    if isinstance(x, str):
        return x
    if isinstance(x, tuple):
        return "(" + ";".join(label_str(e) for e in x) + ")"
    return str(x)


def _split_key(key: str, n: int = 2) -> list[str]:
    parts = key.split(",")
    if len(parts) != n:
        raise InputError(f"key {key!r} must have {n} comma-separated labels")
    return [p.strip() for p in parts]


def groupoid_from_json(data: dict) -> gp.FiniteGroupoid:
    try:
        objects = [str(o) for o in data["objects"]]
        arrows = {str(a["id"]): (str(a["src"]), str(a["tgt"])) for a in data["arrows"]}
        mult = {}
        for key, c in data["mult"].items():
            a, b = _split_key(key)
            mult[(a, b)] = str(c)
    except InputError:
        raise
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed groupoid: {exc}") from None
    G = gp.FiniteGroupoid(objects, arrows, mult, data.get("name", ""))
    bad = G.violations()
    if bad:
        raise InputError("not a groupoid", bad[0].to_json())
    return G


def groupoid_to_json(G: gp.FiniteGroupoid) -> dict:
    s = label_str
    return {
        "name": G.name,
        "objects": [s(x) for x in G.objects],
        "arrows": [{"id": s(a), "src": s(G.src[a]), "tgt": s(G.tgt[a])} for a in G.arrows],
        "mult": {f"{s(a)},{s(b)}": s(c) for (a, b), c in sorted(G.mult.items(), key=lambda kv: gp.label_key(kv[0]))},
    }


def load_groupoid(spec) -> gp.FiniteGroupoid:
    data, kind, _ = load_source(spec)
    if kind == "catalog":
        try:
            return catalog.groupoid(data)
        except KeyError as exc:
            raise InputError(str(exc.args[0])) from None
    if isinstance(data, dict) and "sub" in data:
        pair = groupoid_pair_from_json(data)
        return pair.groupoid
    return groupoid_from_json(data)


def groupoid_pair_from_json(data: dict) -> gp.GroupoidPair:
    G = groupoid_from_json(data)
    pair = gp.GroupoidPair(G, frozenset(str(a) for a in data["sub"]))
    bad = pair.violations()
    if bad:
        raise InputError("not a groupoid pair", bad[0].to_json())
    return pair


def _lookup(labels) -> dict:
    return {label_str(x): x for x in labels}


def groupoid_module_from_json(data: dict, G: gp.FiniteGroupoid) -> gp.GroupoidModule:
    objs, arrs = _lookup(G.objects), _lookup(G.arrows)
    try:
        fibers = {objs[str(k)]: int(v) for k, v in data["fibers"].items()}
        action = {}
        for k, rows in data["action"].items():
            a = arrs[str(k)]
            cols = fibers[G.src[a]]
            action[a] = Matrix(rows, cols=cols) if not rows else Matrix(rows)
    except KeyError as exc:
        raise InputError(f"module refers to unknown label {exc}") from None
    except (TypeError, ValueError) as exc:
        raise InputError(f"malformed groupoid module: {exc}") from None
    E = gp.GroupoidModule(G, fibers, action)
    if set(fibers) != set(G.objects):
        raise InputError("module must give a fiber dimension for every object")
    bad = E.violations()
    if bad:
        raise InputError("not a module", bad[0].to_json())
    return E


def load_groupoid_module(spec, G: gp.FiniteGroupoid) -> gp.GroupoidModule:
    """A file, or ``trivial`` / ``trivial_<dim>`` for the trivial module."""
    data, kind, _ = load_source(spec)
    if kind == "catalog":
        if data == "trivial":
            return gp.trivial_groupoid_module(G)
        if data.startswith("trivial_") and data[8:].isdigit():
            return gp.trivial_groupoid_module(G, int(data[8:]))
        if data == "sign":
            return sign_module(G)
        raise InputError(f"unknown groupoid module {data!r}")
    return groupoid_module_from_json(data, G)


def sign_module(G: gp.FiniteGroupoid) -> gp.GroupoidModule:
    """Rank-1 module of a group on which the non-identity elements of ``ℤ/2`` act by -1."""
    if len(G.objects) != 1 or len(G.arrows) != 2:
        raise InputError("the sign module is only defined here for ℤ/2")
    u = next(iter(G.unit.values()))
    return gp.GroupoidModule(G, {G.objects[0]: 1},
                             {a: Matrix([[1 if a == u else -1]]) for a in G.arrows})


def groupoid_module_to_json(E: gp.GroupoidModule) -> dict:
    return {
        "fibers": {label_str(x): d for x, d in E.fibers.items()},
        "action": {label_str(a): M.to_strings() for a, M in E.action.items()},
    }


def bibundle_from_json(data: dict) -> gp.Bibundle:
    """``{"left", "right", "carrier", "l", "r", "left_action": {"γ,p": p'}, "right_action": {"p,υ": p'}}``."""
    try:
        L = load_groupoid(data["left"]) if isinstance(data["left"], str) else groupoid_from_json(data["left"])
        U = load_groupoid(data["right"]) if isinstance(data["right"], str) else groupoid_from_json(data["right"])
        carrier = [str(p) for p in data["carrier"]]
        Lo, Uo = _lookup(L.objects), _lookup(U.objects)
        La, Ua = _lookup(L.arrows), _lookup(U.arrows)
        l = {str(p): Lo[str(x)] for p, x in data["l"].items()}
        r = {str(p): Uo[str(y)] for p, y in data["r"].items()}
        la = {}
        for key, q in data["left_action"].items():
            g, p = _split_key(key)
            la[(La[g], p)] = str(q)
        ra = {}
        for key, q in data["right_action"].items():
            p, u = _split_key(key)
            ra[(p, Ua[u])] = str(q)
    except InputError:
        raise
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed bibundle: unknown or missing {exc}") from None
    B = gp.Bibundle(L, U, carrier, l, r, la, ra, data.get("name", ""))
    bad = B.violations()
    if bad:
        raise InputError("not a generalized morphism", bad[0].to_json())
    return B


def bibundle_to_json(B: gp.Bibundle) -> dict:
    s = label_str
    return {
        "name": B.name,
        "left": groupoid_to_json(B.left),
        "right": groupoid_to_json(B.right),
        "carrier": [s(p) for p in B.carrier],
        "l": {s(p): s(B.l[p]) for p in B.carrier},
        "r": {s(p): s(B.r[p]) for p in B.carrier},
        "left_action": {f"{s(g)},{s(p)}": s(q) for (g, p), q in B.left_action.items()},
        "right_action": {f"{s(p)},{s(u)}": s(q) for (p, u), q in B.right_action.items()},
    }


def load_bibundle(spec) -> gp.Bibundle:
    data, kind, _ = load_source(spec)
    if kind == "catalog":
        try:
            return catalog.bibundle(data)
        except KeyError as exc:
            raise InputError(str(exc.args[0])) from None
    return bibundle_from_json(data)


def morphism_from_json(data: dict) -> gp.GroupoidMorphism:
    """``{"source", "target", "on_objects": {x: y}, "on_arrows": {a: b}}``; groupoids inline or by name."""
    try:
        L = load_groupoid(data["source"]) if isinstance(data["source"], str) else groupoid_from_json(data["source"])
        U = load_groupoid(data["target"]) if isinstance(data["target"], str) else groupoid_from_json(data["target"])
        Lo, Uo = _lookup(L.objects), _lookup(U.objects)
        La, Ua = _lookup(L.arrows), _lookup(U.arrows)
        phi = gp.GroupoidMorphism(
            L, U,
            {Lo[str(k)]: Uo[str(v)] for k, v in data["on_objects"].items()},
            {La[str(k)]: Ua[str(v)] for k, v in data["on_arrows"].items()},
        )
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed morphism: unknown or missing {exc}") from None
    bad = phi.violations()
    if bad:
        raise InputError("not a groupoid morphism", bad[0].to_json())
    return phi

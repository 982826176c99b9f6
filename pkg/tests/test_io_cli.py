import json
import subprocess
import sys

import pytest

from liepair import groupoid as gp
from liepair import io
from liepair.atiyah import atiyah_class, extend_action
from liepair.catalog import bibundle, example, examples_list, groupoid
from liepair.cli import run
from liepair.lie import bott_module

BAD_JACOBI = {"dim": 3, "brackets": {"0,1": {"0": "1"}, "0,2": {"2": "1"}}}


def _strip_timing(payload):
    out = dict(payload)
    out.pop("timing")
    return out


# -- serialization -----------------------------------------------------------------------


@pytest.mark.parametrize("name", [e.name for e in examples_list()])
def test_pair_roundtrip(name):
    p = example(name).pair
    data = json.loads(json.dumps(io.pair_to_json(p)))
    q = io.pair_from_json(data)
    assert q.g == p.g and q.h_basis == p.h_basis and q.complement == p.complement
    assert atiyah_class(q).vanishes == atiyah_class(p).vanishes


def test_pair_with_catalog_algebra():
    q = io.pair_from_json({"algebra": "so3_so2", "subalgebra": [[0, 0, 1]]})
    assert q.g == example("so3_so2").pair.g


def test_algebra_errors():
    with pytest.raises(io.InputError) as e:
        io.algebra_from_json(BAD_JACOBI)
    assert e.value.detail == {"kind": "jacobi", "where": [0, 1, 2]}
    with pytest.raises(io.InputError):
        io.algebra_from_json({"dim": 2, "brackets": {"1,0": {"0": 1}}})
    with pytest.raises(io.InputError):
        io.algebra_from_json({"brackets": {}})


def test_pair_not_subalgebra():
    data = io.pair_to_json(example("sl2_borel").pair)
    data["subalgebra"] = [[0, 1, 0], [0, 0, 1]]
    data.pop("complement")
    with pytest.raises(io.InputError) as e:
        io.pair_from_json(data)
    assert e.value.detail["kind"] == "not a subalgebra"


def test_module_roundtrip_and_flatness():
    p = example("so3_so2").pair
    bott = bott_module(p)
    assert io.module_from_json(io.module_to_json(bott), p).action == bott.action
    q = example("sl2_borel").pair
    with pytest.raises(io.InputError):
        io.module_from_json({"dim": 1, "action": [[[1]], [[1]]]}, q)


def test_connection_formats():
    p = example("sl2_borel").pair
    bott = bott_module(p)
    a = io.connection_from_json({"complement_values": [[["3"]]]}, p, bott)
    assert a.nabla == extend_action(p, bott, [a.nabla[2]]).nabla
    b = io.connection_from_json({"nabla": [M.to_strings() for M in a.nabla]}, p, bott)
    assert b.nabla == a.nabla
    with pytest.raises(io.InputError):
        io.connection_from_json({"nabla": [[["0"]], [["0"]], [["0"]]]}, p, bott)
    with pytest.raises(io.InputError):
        io.connection_from_json({}, p, bott)


@pytest.mark.parametrize("name", ["pair_3", "sym3", "z2_free", "units_2", "point"])
def test_groupoid_roundtrip(name):
    G = groupoid(name)
    H = io.groupoid_from_json(json.loads(json.dumps(io.groupoid_to_json(G))))
    assert len(H.arrows) == len(G.arrows) and not H.violations()
    E, F = gp.trivial_groupoid_module(G, 2), gp.trivial_groupoid_module(H, 2)
    assert gp.groupoid_cohomology(G, E).dims == gp.groupoid_cohomology(H, F).dims


def test_groupoid_module_roundtrip():
    G = groupoid("cyclic_2")
    E = io.sign_module(G)
    F = io.groupoid_module_from_json(io.groupoid_module_to_json(E), G)
    assert F.action == E.action


def test_bad_groupoid_reported():
    data = io.groupoid_to_json(groupoid("cyclic_3"))
    data["mult"]["1,1"] = "0"
    with pytest.raises(io.InputError) as e:
        io.groupoid_from_json(data)
    assert e.value.detail["kind"] == "associativity"


@pytest.mark.parametrize("name", ["pair_3_to_point", "z2_free_to_point", "point_to_units_2", "unit_cyclic_3"])
def test_bibundle_roundtrip(name):
    B = bibundle(name)
    C = io.bibundle_from_json(json.loads(json.dumps(io.bibundle_to_json(B))))
    assert len(C.carrier) == len(B.carrier)
    assert gp.is_morita(C).is_morita == gp.is_morita(B).is_morita


def test_groupoid_pair_file():
    data = io.groupoid_to_json(groupoid("pair_2"))
    data["sub"] = ["(0;0)", "(1;1)"]
    A = io.load_groupoid(data)
    assert len(A.arrows) == 2
    data["sub"] = ["(0;0)"]
    with pytest.raises(io.InputError):
        io.load_groupoid(data)


def test_morphism_json():
    phi = io.morphism_from_json({"source": "cyclic_2", "target": "sym3", "on_objects": {"*": "*"},
                                 "on_arrows": {"0": "(0;1;2)", "1": "(1;0;2)"}})
    assert not phi.violations()
    with pytest.raises(io.InputError):
        io.morphism_from_json({"source": "cyclic_2", "target": "cyclic_3", "on_objects": {"*": "*"},
                               "on_arrows": {"0": "0", "1": "1"}})


# -- command line ------------------------------------------------------------------------


def test_cli_atiyah_borel():
    code, rep = run(["atiyah", "--pair", "sl2_borel"])
    assert code == 0 and rep["result"]["vanishes"] is False and rep["result"]["h1_dim"] == 1
    assert rep["inputs"]["pair"]["kind"] == "catalog"
    assert all(c["pass"] for c in rep["checks"])


def test_cli_atiyah_vanishing():
    code, rep = run(["atiyah", "--pair", "so3_so2"])
    assert code == 0 and rep["result"]["vanishes"] is True


def test_cli_pbw_precondition():
    code, rep = run(["pbw", "--pair", "sl2_borel", "--degree", "3"])
    assert code == 2
    assert rep["error"]["kind"] == "precondition" and "no compatible connection" in rep["error"]["message"]
    assert rep["result"]["atiyah"]["vanishes"] is False


def test_cli_pbw_with_supplied_connection(tmp_path):
    f = tmp_path / "conn.json"
    f.write_text(json.dumps({"complement_values": [[["1"]]]}))
    code, rep = run(["pbw", "--pair", "sl2_borel", "--degree", "2", "--connection", str(f)])
    assert code == 0 and rep["result"]["equivariance"]["ok"] is False
    assert rep["inputs"]["connection"]["kind"] == "file"


def test_cli_pbw_so3():
    code, rep = run(["pbw", "--pair", "so3_so2", "--degree", "3"])
    assert code == 0 and all(c["pass"] for c in rep["checks"])
    assert rep["result"]["pbw"]["matrices"]["1"]["entries"] == [["0", "0"], ["1", "0"], ["0", "1"]]


def test_cli_invalid_input(tmp_path):
    f = tmp_path / "bad.json"
    f.write_text(json.dumps(BAD_JACOBI))
    code, rep = run(["check", "--algebra", str(f)])
    assert code == 1 and rep["error"]["first_violation"]["kind"] == "jacobi"
    code, rep = run(["atiyah", "--pair", "no_such_pair"])
    assert code == 1
    g = tmp_path / "broken.json"
    g.write_text("{not json")
    assert run(["check", "--pair", str(g)])[0] == 1


def test_cli_check_and_cohomology():
    code, rep = run(["check", "--pair", "heisenberg_center"])
    assert code == 0 and all(c["pass"] for c in rep["checks"])
    code, rep = run(["cohomology", "--pair", "sl2_borel"])
    assert code == 0 and (rep["result"]["H0"], rep["result"]["H1"]) == (0, 0)


def test_cli_examples(capsys):
    code, rep = run(["examples"])
    out = capsys.readouterr().out
    assert code == 0
    assert "sl2_borel: class nonzero" in out
    assert "so3_so2: reductive, class zero" in out
    assert "abelian_n: reductive, class zero" in out


def test_cli_selftest():
    code, rep = run(["selftest"])
    assert code == 0 and rep["result"]["passed"] == rep["result"]["total"]


def test_cli_gpd_commands():
    assert run(["gpd", "validate", "--groupoid", "pair_3"])[1]["result"]["ok"] is True
    assert run(["gpd", "validate", "--bibundle", "pair_3_to_point"])[1]["result"]["ok"] is True
    code, rep = run(["gpd", "cohomology", "--groupoid", "cyclic_2", "--module", "sign"])
    assert code == 0 and rep["result"]["dims"]["1"]["H"] == 0
    code, rep = run(["gpd", "compose", "pair_3_to_point", "unit_point"])
    assert code == 0 and rep["result"]["carrier_size"] == 3 and all(c["pass"] for c in rep["checks"])
    assert run(["gpd", "compose", "pair_3_to_point", "pair_3_to_point"])[0] == 1
    assert run(["gpd", "morita", "--bibundle", "z2_free_to_point"])[1]["result"]["is_morita"] is True
    assert run(["gpd", "morita", "--bibundle", "point_to_units_2"])[1]["result"]["is_morita"] is False
    code, rep = run(["gpd", "associate", "--bibundle", "pair_3_to_point", "--module", "trivial_2"])
    assert code == 0 and rep["result"]["invariance"]["equal"] is True


def test_cli_gpd_invalid_module():
    assert run(["gpd", "cohomology", "--groupoid", "pair_2", "--module", "sign"])[0] == 1


def test_cli_out_file_and_determinism(tmp_path):
    out = tmp_path / "r.json"
    code, rep = run(["atiyah", "--pair", "sl2_borel", "--out", str(out)])
    stored = json.loads(out.read_text())
    assert _strip_timing(stored) == _strip_timing(rep)
    first = run(["atiyah", "--pair", "sl2_borel"])[1]
    again = run(["atiyah", "--pair", "sl2_borel"])[1]
    assert json.dumps(_strip_timing(again), sort_keys=True) == json.dumps(_strip_timing(first), sort_keys=True)


@pytest.mark.parametrize("argv", [
    ["atiyah", "--pair", "matched_sl2"],
    ["pbw", "--pair", "heisenberg_center", "--degree", "2"],
    ["gpd", "morita", "--bibundle", "pair_2_to_point"],
])
def test_reports_reparse(argv):
    rep = run(argv)[1]
    assert json.loads(json.dumps(rep, ensure_ascii=False)) == rep


def test_json_flag_and_subprocess():
    proc = subprocess.run([sys.executable, "-m", "liepair.cli", "atiyah", "--pair", "sl2_borel", "--json"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["vanishes"] is False
    proc = subprocess.run([sys.executable, "-m", "liepair.cli", "pbw", "--pair", "sl2_borel"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 2 and "precondition" in proc.stdout

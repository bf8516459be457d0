import io
import json

import pytest

from floeralg.cli import fixture_names, main, parse_weights


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def run_json(*argv):
    code, text = run(*argv, "--format", "json")
    doc = json.loads(text)
    assert doc["schema"] == "1"
    return code, doc


def test_bundled_fixtures_listed():
    names = fixture_names()
    for n in ("rp3", "rp3_broken", "pearl_demo", "rp3_homology", "chain4"):
        assert n in names


# -- check ----------------------------------------------------------------------------


@pytest.mark.parametrize("name", ["rp2", "rp3", "s1", "s2", "t2", "cp2"])
def test_check_passes_on_fixtures(name):
    code, text = run("check", name)
    assert code == 0 and text.strip().endswith("PASS")


def test_check_reports_broken_entry():
    code, doc = run_json("check", "rp3_broken")
    assert code == 1 and not doc["ok"]
    assert doc["checks"]["d_squared"]["violations"]


def test_check_homotopy_document():
    code, doc = run_json("check", "hmtp_demo")
    assert code == 0 and doc["kind"] == "homotopy"
    assert doc["checks"]["homotopy"]["ok"]


def test_check_bimodule_document():
    code, doc = run_json("check", "pearl_demo")
    assert code == 0 and doc["kind"] == "bimodule"
    assert doc["checks"]["chain_map"]["ok"]


def test_check_detects_broken_homotopy(tmp_path):
    doc = json.loads(open(_fixture_path("hmtp_demo")).read())
    inc = doc["pearl"]["incidences"][0]
    inc["count"] += 1
    p = tmp_path / "h.json"
    p.write_text(json.dumps(doc))
    code, rep = run_json("check", str(p))
    assert code == 1 and not rep["ok"]


def _fixture_path(name):
    from importlib import resources
    return resources.files("floeralg") / "fixtures" / f"{name}.json"


# -- input errors ----------------------------------------------------------------------


def test_missing_input_exits_2():
    assert run("check", "/nonexistent/file.json")[0] == 2


def test_malformed_json_exits_2(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{ not json")
    assert run("check", str(p))[0] == 2
    p.write_text(json.dumps({"kind": "nonsense"}))
    assert run("check", str(p))[0] == 2
    p.write_text(json.dumps({"two_n": 0, "omega": 1, "generators": [{"id": "a"}]}))
    assert run("homology", str(p))[0] == 2


def test_bad_arguments_exit_2():
    assert run("frobnicate")[0] == 2
    assert run("homology", "rp3", "--two-n", "3")[0] == 2
    assert run("homology", "rp3", "--precision", "0")[0] == 2


# -- homology ----------------------------------------------------------------------------


def test_homology_text():
    code, text = run("homology", "rp2")
    assert code == 0
    lines = text.splitlines()
    assert "H0: Λ" in lines and "H1: Λ/(2)" in lines and "H2: 0" in lines


def test_homology_regraded():
    code, text = run("homology", "rp3", "--two-n", "2")
    assert code == 0 and "H1: Λ ⊕ Λ/(2)" in text.splitlines()


def test_homology_zero_differential():
    code, doc = run_json("homology", "s2")
    assert code == 0
    assert all(c["torsion"] == [] for c in doc["classes"].values())
    assert sum(c["rank"] for c in doc["classes"].values()) == 2


def test_homology_refuses_broken_complex():
    code, doc = run_json("homology", "rp3_broken")
    assert code == 1 and doc["violations"]


def test_json_output_is_deterministic():
    a = run("homology", "cp2", "--format", "json", "--seed", "7")
    b = run("homology", "cp2", "--format", "json", "--seed", "7")
    assert a == b


# -- arnold and verify ---------------------------------------------------------------------


def test_arnold_rp3():
    code, doc = run_json("arnold", "rp3_homology")
    assert code == 0 and doc["bound"] == 4 and doc["betti_sum"] == 2


def test_arnold_odd_torsion():
    code, doc = run_json("arnold", "odd_torsion_homology")
    assert doc["bound"] == doc["betti_sum"] + 2


def test_arnold_torsion_free():
    code, doc = run_json("arnold", "s2_homology")
    assert code == 0 and doc["bound"] == doc["betti_sum"] == 2
    assert all(r["tau"] == 0 for r in doc["table"])


def test_arnold_minimal_chern_override():
    code, doc = run_json("arnold", "rp3_homology", "--minimal-chern", "0")
    assert doc["minimal_chern"] == 0 and [r["class"] for r in doc["table"]] == [0, 1, 2, 3]


def test_verify_rp3():
    code, doc = run_json("verify", "rp3", "rp3_homology")
    assert code == 0 and doc["ok"] and doc["slack"] == 0


def test_verify_with_padding(tmp_path):
    fc = json.loads(open(_fixture_path("rp3")).read())
    fc["generators"] += [{"id": "u", "index": 1, "action": -2}, {"id": "v", "index": 0, "action": -1}]
    fc["incidences"].append({"from": "u", "to": "v", "t": 0, "count": 1})
    p = tmp_path / "padded.json"
    p.write_text(json.dumps(fc))
    code, doc = run_json("verify", str(p), "rp3_homology")
    assert code == 0 and doc["slack"] == 2


def test_verify_fails_on_small_complex():
    code, doc = run_json("verify", "s2", "rp3_homology")
    assert code == 1 and not doc["ok"]


# -- equipoly --------------------------------------------------------------------------------


def test_parse_weights():
    assert parse_weights("1,2", [3]) == [(1,), (2,)]
    assert parse_weights("1,0;0,1", [2, 2]) == [(1, 0), (0, 1)]
    assert parse_weights("", [2]) == []


def test_equipoly_dim():
    code, text = run("equipoly", "dim", "--group", "2", "--v-weights", "1", "--w-weights", "1", "--degree", "3")
    assert code == 0 and text.strip().endswith("= 2")


def test_equipoly_check_json():
    code, doc = run_json("equipoly", "check", "--group", "2,2", "--v-weights", "1,0;0,1",
                         "--w-weights", "1,1", "--degree", "2", "--trials", "10", "--seed", "3")
    assert code == 0 and doc["surjective"] and doc["trials"] == 10
    again = run_json("equipoly", "check", "--group", "2,2", "--v-weights", "1,0;0,1",
                     "--w-weights", "1,1", "--degree", "2", "--trials", "10", "--seed", "3")
    assert again[1] == doc


def test_equipoly_not_surjective_exits_1():
    # Z/3 with V weight 1, W weight 2: degree 1 has no nonzero equivariant maps
    code, doc = run_json("equipoly", "check", "--group", "3", "--v-weights", "1",
                         "--w-weights", "2", "--degree", "1", "--trials", "5")
    assert code == 1 and not doc["surjective"]


def test_equipoly_input_errors():
    assert run("equipoly", "dim", "--group", "2", "--v-weights", "x", "--w-weights", "1",
               "--degree", "1")[0] == 2
    assert run("equipoly", "dim", "--group", "2", "--v-weights", "1", "--w-weights", "1",
               "--degree", "-1")[0] == 2
    assert run("equipoly", "check", "--group", "4", "--v-weights", "2", "--w-weights", "2",
               "--degree", "1", "--subgroup", "")[0] == 2   # empty stratum


# -- strata --------------------------------------------------------------------------------


def test_strata_chain():
    code, doc = run_json("strata", "--chain", "5")
    assert code == 0 and doc["words"] == 8 and doc["interior"] == 3


def test_strata_poset_file_with_samples():
    code, doc = run_json("strata", "--poset", "chain4", "--samples", "50", "--seed", "1")
    assert code == 0 and doc["words"] == 4
    assert doc["outer_product"]["ok"] and doc["outer_product"]["samples"] == 50


def test_strata_input_errors():
    assert run("strata", "--chain", "1")[0] == 2
    assert run("strata", "--poset", "chain4", "--from", "zz")[0] == 2

import json

import pytest

from pgkneser.cli import main, parse_budget


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_space_info(capsys):
    code, out, _ = run(capsys, "space-info", "-d", "4", "-q", "2", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["chambers"] == 9765 and doc["coflags"] == 1085 and doc["enumeration_matches"]


def test_space_info_refuses_large(capsys):
    code, out, _ = run(capsys, "space-info", "-d", "4", "-q", "7", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["enumerated"] is None
    assert doc["chambers"] == 510_902_400 and doc["subspaces"]["lines"] == 140_050


def test_space_info_errors(capsys):
    assert run(capsys, "space-info", "-d", "4", "-q", "6")[0] == 2
    assert "prime power" in run(capsys, "space-info", "-d", "4", "-q", "12")[2]
    assert run(capsys, "space-info", "-d", "4", "-q", "11")[0] == 2


def test_construct_and_verify(capsys, tmp_path):
    code, out, _ = run(capsys, "construct", "--family", "b", "-q", "2", "--out", str(tmp_path), "--binary")
    assert code == 0 and "match formula" in out
    files = sorted(p.name for p in tmp_path.iterdir())
    assert files == ["blowup_b_q2.json", "blowup_b_q2.knset", "family_b_q2.json", "family_b_q2.knset"]
    code, out, _ = run(capsys, "verify", str(tmp_path / "blowup_b_q2.json"), "--format", "json")
    doc = json.loads(out)
    assert code == 0 and all(c["status"] == "pass" for c in doc["claims"])
    assert {c["claim_id"] for c in doc["claims"]} >= {"independence", "maximality", "weight_spectrum", "low_weight_in_plane"}
    code, _, _ = run(capsys, "verify", str(tmp_path / "family_b_q2.knset"), "--checks", "independence", "maximality")
    assert code == 0
    spec = tmp_path / "spectrum.csv"
    code, _, _ = run(capsys, "verify", str(tmp_path / "blowup_b_q2.json"), "--checks", "weights", "--spectrum-csv", str(spec))
    assert code == 0 and spec.read_text().splitlines() == ["weight,coflags,chambers", "9,133,1197"]


def test_construct_bad_anchor(capsys, tmp_path):
    code, _, err = run(capsys, "construct", "--family", "a", "-q", "2", "--out", str(tmp_path),
                       "--anchor-solid", "10000;01000;00100;00010", "--anchor-point", "00001")
    assert code == 2 and "not contained" in err


def test_verify_detects_dependent_set(capsys, tmp_path, chambers2):
    u, v = 0, int(chambers2.neighbours(0)[0])
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"d": 4, "q": 2, "flavor": "chambers", "vertices": [chambers2.encode(u), chambers2.encode(v)]}))
    code, out, _ = run(capsys, "verify", str(p), "--format", "json")
    doc = json.loads(out)
    assert code == 1 and doc["claims"][0]["status"] == "fail" and doc["claims"][0]["witness"]


def test_verify_malformed(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    assert run(capsys, "verify", str(p))[0] == 2


def test_bounds(capsys):
    code, out, _ = run(capsys, "bounds", "-q", "2", "--format", "json", "--threshold", "--deterministic")
    doc = json.loads(out)
    assert code == 0 and doc["values"][0]["alpha"] == 1197
    assert doc["claims"][0]["computed_value"]["smallest_q"] == 749
    code, out, _ = run(capsys, "bounds", "--range", "2:4", "--format", "csv")
    assert out.splitlines()[0].startswith("q,alpha") and len(out.splitlines()) == 4


def test_identities(capsys):
    code, out, _ = run(capsys, "identities", "--format", "json")
    statuses = {c["claim_id"]: c["status"] for c in json.loads(out)["claims"]}
    assert code == 0 and statuses["identity_gamma_vs_stated_case_B"] == "finding"


def test_search_modes(capsys, tmp_path):
    code, out, _ = run(capsys, "search", "--flavor", "gamma2", "-q", "3", "--mode", "exact", "--out", str(tmp_path), "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["size"] == 7 and doc["status"] == "optimal"
    code, out, _ = run(capsys, "search", "--flavor", "lineplane", "-q", "2", "--mode", "exact", "--budget", "1s",
                       "--override", "--out", str(tmp_path), "--format", "json")
    assert json.loads(out)["status"] == "inconclusive"
    assert run(capsys, "search", "--flavor", "gamma4", "-q", "2", "--mode", "exact", "--out", str(tmp_path))[0] == 2


def test_deterministic_output(capsys, tmp_path):
    args = ("search", "--flavor", "gamma4", "-q", "2", "--seed", "5", "--out", str(tmp_path), "--format", "json", "--deterministic")
    a = run(capsys, *args)[1]
    b = run(capsys, *args)[1]
    assert a == b
    assert (tmp_path / "search_gamma4_q2_greedy.json").exists()


def test_parse_budget():
    assert parse_budget("1h") == 3600 and parse_budget("90") == 90 and parse_budget("2m") == 120
    with pytest.raises(Exception):
        parse_budget("soon")

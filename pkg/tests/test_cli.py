import json

import pytest

from teichforge import cli

INDEX2 = {"schema": "teichforge/delta/v1", "mark": "Gamma2", "degree": 2,
          "perms": {"G1": [1, 0], "G2": [0, 1]}}
WHOLE = {"perms": {"G1": [0], "G2": [0]}}


@pytest.fixture
def files(tmp_path):
    d2 = tmp_path / "d2.json"
    d2.write_text(json.dumps(INDEX2))
    whole = tmp_path / "whole.json"
    whole.write_text(json.dumps(WHOLE))
    return tmp_path, d2, whole


def run(args, capsys):
    code = cli.main([str(a) for a in args])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_construct_is_byte_identical(files, capsys):
    tmp, d2, _ = files
    for name in ("a.json", "b.json"):
        code, _, _ = run(["construct", "--delta", d2, "--seed", 1, "--out", tmp / name], capsys)
        assert code == 0
    assert (tmp / "a.json").read_bytes() == (tmp / "b.json").read_bytes()
    cli.validate(json.loads((tmp / "a.json").read_text()), "certificate")


def test_malformed_json_exits_2(files, capsys):
    tmp, _, _ = files
    bad = tmp / "bad.json"
    bad.write_text('{"perms": {"G1": [0]')
    code, out, _ = run(["construct", "--delta", bad], capsys)
    assert code == 2
    err = json.loads(out)
    assert err["kind"] == "parse"
    cli.validate(err, "error")


def test_schema_violation_exits_2(files, capsys):
    tmp, _, _ = files
    bad = tmp / "bad.json"
    bad.write_text('{"perms": {"G1": [0]}}')
    code, out, _ = run(["decompose", "--delta", bad], capsys)
    assert code == 2 and json.loads(out)["kind"] == "input"


def test_verify_pass_and_mismatch(files, capsys):
    tmp, d2, whole = files
    cert = tmp / "c.json"
    run(["construct", "--delta", d2, "--out", cert], capsys)
    code, out, err = run(["verify", "--cert", cert, "--delta", d2], capsys)
    assert code == 0 and json.loads(out)["status"] == "PASS"
    code, out, err = run(["verify", "--cert", cert, "--delta", whole], capsys)
    assert code == 1 and "delta matches certificate" in err


def test_toy_certificate_warns(files, capsys):
    tmp, _, whole = files
    cert = tmp / "toy.json"
    code, _, err = run(["construct", "--delta", whole, "--toy-primes", "2,2,3,2", "--out", cert], capsys)
    assert code == 0 and "toy" in err
    assert json.loads(cert.read_text())["faithful"] is False
    code, out, _ = run(["verify", "--cert", cert, "--delta", whole], capsys)
    assert code == 0 and json.loads(out)["status"] == "PASS-with-warning"
    code, out, _ = run(["export", "--cert", cert], capsys)
    assert code == 0 and json.loads(out)["degree"] == 3456


def test_lemmas_filter_and_vacuous(capsys):
    code, out, _ = run(["lemmas", "--suite", "lemma3", "--samples", "0"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["status"] == "PASS-with-warning"
    assert [r["suite"] for r in rep["result"]] == ["lemma3"]
    code, out, _ = run(["lemmas", "--suite", "lemma1"], capsys)
    assert code == 0 and json.loads(out)["status"] == "PASS"
    code, out, _ = run(["lemmas", "--suite", "nope"], capsys)
    assert code == 2


def test_veech_origami_text(tmp_path, capsys):
    o = tmp_path / "o.txt"
    o.write_text("3\n1 0 2\n2 1 0\n")
    code, out, _ = run(["veech", "--origami", o], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["result"]["veech"]["orbit_size"] == 3
    assert rep["result"]["origami"]["genus"] == 2


def test_export_atlas_decompose_selfnorm(files, capsys):
    _, d2, _ = files
    code, out, _ = run(["export", "--pi14", "--format", "text"], capsys)
    assert code == 0 and out.splitlines()[0] == "4"
    code, out, _ = run(["atlas"], capsys)
    assert json.loads(out)["pi14"]["index_in_pi11"] == 4
    code, out, _ = run(["decompose", "--delta", d2], capsys)
    assert code == 0 and json.loads(out)["result"]["k"] == 2
    code, out, _ = run(["selfnorm", "--delta", d2, "--seed", 2], capsys)
    assert code == 0 and json.loads(out)["result"]["subgroup"]["mark"] == "F03"


def test_budget_error(files, capsys):
    _, d2, _ = files
    code, out, _ = run(["selfnorm", "--delta", d2, "--budget", 1], capsys)
    assert code == 1 and json.loads(out)["kind"] == "budget"

import json

import pytest

from bdgkit import cli
from bdgkit.config import DEFAULTS, OUTPUT_ENV, load_config
from bdgkit.errors import ConfigInvalid, MissingArtifact
from bdgkit.reports import Check, csv_text, emit_plotdata, read_csv_body, write_csv, write_json


def test_defaults_valid(monkeypatch):
    monkeypatch.delenv(OUTPUT_ENV, raising=False)
    cfg = load_config()
    assert cfg == DEFAULTS


@pytest.mark.parametrize("doc", [
    {"nope": 1},
    {"profile": {"tol": -1.0}},
    {"profile": 3},
    {"ansatz": {"alphas": [1.5]}},
    {"ansatz": {"theta0": 0.1, "delta": 0.05}},
    {"jacobi": {"rhs": "bogus"}},
    {"graph": {"correction": "x"}},
    {"schema_version": 2},
])
def test_invalid_configs(tmp_path, doc):
    p = tmp_path / "c.json"
    p.write_text(json.dumps(doc))
    with pytest.raises(ConfigInvalid):
        load_config(p)


def test_unreadable_config(tmp_path):
    p = tmp_path / "c.json"
    p.write_text("{not json")
    with pytest.raises(ConfigInvalid):
        load_config(p)


def test_precedence(tmp_path, monkeypatch):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"output_dir": "from_file", "graph": {"R": 30.0}}))
    monkeypatch.delenv(OUTPUT_ENV, raising=False)
    cfg = load_config(p, {"graph": {"nr": 50}})
    assert cfg["output_dir"] == "from_file"
    assert cfg["graph"]["R"] == 30.0 and cfg["graph"]["nr"] == 50
    monkeypatch.setenv(OUTPUT_ENV, str(tmp_path / "env"))
    assert load_config(p)["output_dir"] == str(tmp_path / "env")


def test_csv_and_json_writers(tmp_path):
    body = csv_text(["a", "b"], [(1, 0.1), (2, float("nan"))])
    assert body.splitlines() == ["a,b", "1,0.1", "2,nan"]
    path = write_csv(tmp_path / "x.csv", ["a", "b"], [(1, 0.1)])
    assert path.read_text().startswith("# generated by bdgkit")
    assert read_csv_body(path) == "a,b\n1,0.1\n"
    j = write_json(tmp_path / "x.json", {"b": float("inf"), "a": [1.5]})
    assert json.loads(j.read_text()) == {"a": [1.5], "b": "inf"}


def test_check_margins():
    assert Check("x", 0.5, 1.0, "le").margin == 0.5
    assert Check("x", 2.0, 1.0, "ge").passed
    assert not Check("x", float("nan"), 1.0, "le").passed


def test_cli_profile(tmp_path, monkeypatch, capsys):
    monkeypatch.delenv(OUTPUT_ENV, raising=False)
    assert cli.main(["profile", "--output-dir", str(tmp_path)]) == 0
    doc = json.loads((tmp_path / "profile.json").read_text())
    assert doc["passed"] and doc["status"] == "pass"
    assert "seconds" not in doc
    assert (tmp_path / "profile.csv").exists()
    assert "PASS" in capsys.readouterr().out


def test_cli_env_output(tmp_path, monkeypatch):
    monkeypatch.setenv(OUTPUT_ENV, str(tmp_path / "env"))
    assert cli.main(["profile"]) == 0
    assert (tmp_path / "env" / "profile.json").exists()
    # an explicit flag wins over the environment
    assert cli.main(["profile", "--output-dir", str(tmp_path / "flag")]) == 0
    assert (tmp_path / "flag" / "profile.json").exists()


def test_cli_verification_failure(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"coords": {"n_samples": 100, "roundtrip_tol": 1e-30}}))
    assert cli.main(["coords", "--config", str(cfg), "--output-dir", str(tmp_path)]) == 1
    doc = json.loads((tmp_path / "coords.json").read_text())
    assert doc["status"] == "fail"
    assert not doc["checks"]["roundtrip_rel_err"]["passed"]


def test_cli_config_error(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"coords": {"orth_tol": -1}}))
    assert cli.main(["coords", "--config", str(cfg), "--output-dir", str(tmp_path)]) == 2
    assert "config error" in capsys.readouterr().err


def test_cli_flag_overrides(tmp_path):
    assert cli.main(["jacobi-solve", "--rhs", "manufactured", "--R", "40",
                     "--output-dir", str(tmp_path)]) == 0
    doc = json.loads((tmp_path / "jacobi_solve.json").read_text())
    assert list(doc["checks"]) == ["certificate_R40"]


def test_plotdata(tmp_path):
    assert cli.main(["profile", "--output-dir", str(tmp_path)]) == 0
    assert cli.main(["plotdata", "--output-dir", str(tmp_path)]) == 0
    text = read_csv_body(tmp_path / "plotdata.csv")
    assert text.startswith("suite,series,x,y\n")
    assert "profile,g," in text
    assert cli.main(["plotdata", str(tmp_path / "missing.json"), "--output-dir", str(tmp_path)]) == 2
    with pytest.raises(MissingArtifact):
        emit_plotdata([], tmp_path / "p.csv")


def test_unknown_subcommand():
    with pytest.raises(SystemExit):
        cli.main(["bogus"])

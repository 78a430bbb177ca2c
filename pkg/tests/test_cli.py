import json

import pytest

from jamgame.cli import build_config, main


def run(capsys, *args):
    code = main(list(args))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_curve_csv(capsys):
    code, out, _ = run(capsys, "curve", "--set", "J_curve=0:10:3")
    assert code == 0
    body = [l for l in out.splitlines() if not l.startswith("#")]
    assert body[0] == "j_m,p_m"
    assert len(body) == 4
    assert "config_sha256" in out


def test_config_errors_listed_together(capsys):
    code, _, err = run(capsys, "curve", "--set", "rate=0", "--set", "sigma2=x", "--set", "bogus=1")
    assert code == 2
    report = json.loads(err)
    assert report["error"] == "ConfigError"
    assert len(report["fields"]) == 3


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# preset\nP_bar = 45\ncsi = none\n")
    code, out, _ = run(capsys, "equilibrium", "--config", str(cfg))
    assert code == 0
    assert json.loads(out)["branch"] == "S_negative"


def test_simulate_is_reproducible(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert main(["simulate", "--samples", "20000", "--seed", "4", "--out", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_compare_csi_curve(capsys):
    code, out, _ = run(capsys, "compare-csi", "--set", "compare=curve", "--set", "J_curve=5,10")
    rows = [l.split(",") for l in out.splitlines() if not l.startswith("#")][1:]
    assert code == 0
    assert all(float(nocsi) >= float(full) for _, full, nocsi in rows)


def test_digest_tracks_config():
    assert build_config({}).digest != build_config({"seed": "1"}).digest
    assert build_config({}).digest == build_config({"seed": "0"}).digest


def test_runtime_error_is_json(capsys):
    code, _, err = run(capsys, "curve", "--set", "channel=tabulated:/nonexistent.csv")
    assert code == 1
    assert "error" in json.loads(err)

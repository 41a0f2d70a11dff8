import csv
import io
import json
import math
import subprocess
import sys

import pytest

from elliptic_loewner import elliptic
from elliptic_loewner.cli import main, parse_complex

INITIAL = {"y": 1.5, "eta": 0.6, "coeffs": [1.0, {"re": 0.3, "im": 0.2}, {"re": 0.0, "im": -0.1}]}
SINUSOID = {"kind": "sinusoid", "offset": 0.05, "amplitude": 0.1, "frequency": 0.7}


def call(*argv):
    out = io.StringIO()
    code = main([str(a) for a in argv], out)
    return code, out.getvalue()


def write_json(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


def test_parse_complex():
    assert parse_complex("1.5") == 1.5
    assert parse_complex("0.2+0.1i") == 0.2 + 0.1j
    assert parse_complex("-1j") == -1j
    assert parse_complex("i") == 1j
    with pytest.raises(Exception):
        parse_complex("abc")


def test_theta_examples():
    code, text = call("theta", "--a", 3, "--u", "0", "--tau", "1i")
    assert code == 0
    assert json.loads(text) == {"re": pytest.approx(1.0864348112133082, abs=1e-15), "im": 0.0}
    consts = [json.loads(call("theta", "--a", a, "--u", 0, "--tau", "1i")[1])["re"] for a in (2, 3, 4)]
    _, text = call("theta", "--a", 1, "--u", 0, "--tau", "1i", "--du", 1)
    d1 = json.loads(text)["re"]
    assert abs(d1 - math.pi * math.prod(consts)) < 1e-12 * d1


@pytest.mark.parametrize(
    "argv",
    [
        ["theta", "--a", "5", "--u", "0", "--tau", "1i"],
        ["theta", "--a", "1", "--u", "0", "--tau", "-1i"],
        ["theta", "--a", "1", "--u", "x", "--tau", "1i"],
        ["verify", "--suite", "ss2"],
        ["verify", "--suite", "nope", "--seed", "1"],
        ["loewner", "--config", "/nonexistent.json"],
    ],
)
def test_bad_input_exits_2(argv):
    with pytest.raises(SystemExit) as info:
        code = main(argv, io.StringIO())
        raise SystemExit(code)
    assert info.value.code == 2


def test_verify(tmp_path):
    report = tmp_path / "r.json"
    code, text = call("verify", "--suite", "ss3", "--samples", 100, "--seed", 4, "--report", report)
    assert code == 0
    assert "PASS ss3" in text
    data = json.loads(report.read_text())
    assert data["passed"] and data["identities"][0]["attempted"] == 100
    code, _ = call("verify", "--suite", "ap", "--samples", 20, "--seed", 4, "--plant-pole")
    assert code == 0


def test_verify_mutation_exits_1(monkeypatch):
    monkeypatch.setattr(elliptic, "s_prime", lambda u, tau, pole_guard=None: elliptic.s_prime_printed_form(u, tau))
    code, text = call("verify", "--suite", "ss2", "--samples", 50, "--seed", 1)
    assert code == 1
    assert "FAIL ss2" in text


def test_loewner_default(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    report = tmp_path / "r.json"
    assert call("loewner", "--csv", a, "--report", report)[0] == 0
    assert call("loewner", "--csv", b)[0] == 0
    assert a.read_bytes() == b.read_bytes()
    data = json.loads(report.read_text())
    assert data["passed"]
    for ident in data["identities"]:
        if not ident["informational"]:
            assert ident["max_residual"] < 1e-8
    rows = list(csv.DictReader(a.open()))
    assert len(rows) == 51
    assert float(rows[0]["y"]) == 1.5 and float(rows[-1]["y"]) == 0.5


def test_loewner_fixed_point(tmp_path):
    cfg = {"kappa": {"kind": "constant", "value": 0.2}, "initial": {**INITIAL, "eta": 1.0}, "y_end": 0.5}
    out = tmp_path / "t.csv"
    assert call("loewner", "--config", write_json(tmp_path / "c.json", cfg), "--csv", out)[0] == 0
    etas = [float(r["eta"]) for r in csv.DictReader(out.open())]
    assert max(abs(e - 1.0) for e in etas) < 1e-9
    # the identities involve S(eta), singular at eta = 1: every probe is rejected
    report = tmp_path / "r.json"
    assert call("loewner", "--config", str(tmp_path / "c.json"), "--csv", out, "--report", report)[0] == 0
    ap1 = json.loads(report.read_text())["identities"][0]
    assert ap1["informational"] and ap1["rejected"] == 11


def test_loewner_stdout():
    code, text = call("loewner")
    assert code == 0
    assert text.startswith("y,eta,kappa,")


def test_loewner_unknown_key(tmp_path):
    cfg = {"kappa": SINUSOID, "initial": INITIAL, "y_end": 0.5, "colour": "red"}
    assert call("loewner", "--config", write_json(tmp_path / "c.json", cfg))[0] == 2
    cfg = {"kappa": {**SINUSOID, "colour": 1}, "initial": INITIAL, "y_end": 0.5}
    assert call("loewner", "--config", write_json(tmp_path / "c.json", cfg))[0] == 2


def test_loewner_blow_up(tmp_path):
    # a marked point whose image sits on a theta_1 zero
    cfg = {
        "kappa": {"kind": "constant", "value": 0.0},
        "initial": {"y": 1.5, "eta": 0.6, "coeffs": [1.0], "points": {"p": -1 / 0.3}},
        "y_end": 0.5,
    }
    report = tmp_path / "r.json"
    code, _ = call("loewner", "--config", write_json(tmp_path / "c.json", cfg), "--report", report)
    assert code == 3
    assert json.loads(report.read_text())["meta"]["last_good_y"] == 1.5


def test_faber():
    code, text = call("faber", "--coeffs", "1,0.3+0.2i", "--v", "0.1+0.2i", "--tau", "1i", "--order", 2)
    assert code == 0
    assert json.loads(text)
    code, text = call("faber", "--coeffs", "1,0.3+0.2i", "--tau", "1i", "--eta", 0.6, "--kappa", 0.1)
    assert code == 0
    assert json.loads(text)
    assert call("faber", "--coeffs", "1", "--tau", "0.5+1i", "--eta", 0.6)[0] == 2


def hodo_cfg(**kw):
    cfg = {
        "kappa": SINUSOID,
        "initial": INITIAL,
        "y_end": 0.5,
        "order": 2,
        "profile": {"kind": "planted", "y0": 1.0},
        "times": {"t0": 0.3, "t": [{"re": 0.5, "im": 0.2}, {"re": -0.4, "im": 0.1}]},
        "bracket": [0.85, 1.15],
        "h": 2e-3,
    }
    cfg.update(kw)
    return cfg


def test_hodograph_grid(tmp_path):
    cfg = hodo_cfg(grid={"re_t1": [-0.005, 0.0, 0.005]}, cross_symmetry=[[1, 2]])
    out, report = tmp_path / "g.csv", tmp_path / "r.json"
    code, _ = call("hodograph", "--config", write_json(tmp_path / "c.json", cfg), "--csv", out, "--report", report)
    assert code == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 3
    assert {"t0", "re_t1", "im_t2", "y_star", "L9_t1", "L11"} <= set(rows[0])
    data = {r["name"]: r for r in json.loads(report.read_text())["identities"]}
    assert data["planted_root"]["max_residual"] < 1e-10
    assert abs(data["L11"]["extra"]["order"] - 2.0) < 0.2
    assert "cross_t1_t2" in data


def test_hodograph_k0(tmp_path):
    cfg = hodo_cfg(
        kappa={"kind": "constant", "value": 0.1},
        order=0,
        profile={"kind": "planted", "y0": 0.9},
        times={"t0": 1.0},
        bracket=[0.8, 1.0],
        h=1e-4,
    )
    report = tmp_path / "r.json"
    code, text = call("hodograph", "--config", write_json(tmp_path / "c.json", cfg), "--report", report)
    assert code == 0
    data = {r["name"]: r for r in json.loads(report.read_text())["identities"]}
    assert data["L11"]["max_residual"] < 1e-6
    assert set(data) >= {"L11", "planted_root", "root_residual"}


def test_hodograph_no_bracket(tmp_path, capsys):
    cfg = hodo_cfg(bracket=[1.2, 1.3])
    code, _ = call("hodograph", "--config", write_json(tmp_path / "c.json", cfg))
    assert code == 2
    assert capsys.readouterr().err.count("\n") > 10
    cfg = hodo_cfg(grid={"x_t9": [0.0]})
    assert call("hodograph", "--config", write_json(tmp_path / "c.json", cfg))[0] == 2


def test_console_script_exit_codes():
    ok = subprocess.run(
        [sys.executable, "-m", "elliptic_loewner", "theta", "--a", "1", "--u", "0.25", "--tau", "1i"],
        capture_output=True,
        text=True,
    )
    assert ok.returncode == 0 and json.loads(ok.stdout)
    bad = subprocess.run([sys.executable, "-m", "elliptic_loewner", "theta"], capture_output=True, text=True)
    assert bad.returncode == 2

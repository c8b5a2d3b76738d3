import hashlib
import json
import math
import subprocess
import sys

import pytest

from boltzgain.cli import main
from boltzgain.gain import GridFunction
from boltzgain.kernel import AngularKernel, XiMeasure, beta_b
from boltzgain.radial import RadialProfile, bilinear_B


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_beta_example(capsys):
    code, out, _ = run(capsys, "beta", "--kernel", "constant:1", "--n", "3", "--x", "-0.5", "--y", "-0.5")
    assert code == 0
    assert "value: 3.14159265" in out and "Finite" in out


def test_beta_json_matches_module(capsys):
    code, out, _ = run(capsys, "beta", "--kernel", "power:1,0.25", "--x", "-0.3", "--y", "0.2",
                       "--format", "json")
    rec = json.loads(out)
    want = beta_b(-0.3, 0.2, XiMeasure(AngularKernel.power(1, 0.25), 3)).value
    assert code == 0 and rec["value"] == want


def test_cutoff_example(capsys):
    code, out, _ = run(capsys, "cutoff", "--kernel", "constant:1", "--n", "3")
    assert code == 0 and "value: 12.56637" in out


def test_op_b_is_a_thin_adapter(capsys):
    code, out, _ = run(capsys, "op-b", "--g", "indicator:0,1", "--h", "indicator:0,1",
                       "--x", "1.5,2.5", "--format", "csv")
    lines = out.splitlines()
    ind = RadialProfile.indicator(0, 1)
    want = bilinear_B(ind, ind, 1.5, XiMeasure(AngularKernel.constant(1), 3))
    assert code == 0 and lines[0] == "x,value"
    assert float(lines[1].split(",")[1]) == want and float(lines[2].split(",")[1]) == 0.0


def test_op_p(capsys):
    code, out, _ = run(capsys, "op-p", "--g", "gaussian:1", "--h", "gaussian:1", "--k", "0,0,1",
                       "--format", "json")
    assert code == 0 and json.loads(out)["value"] == pytest.approx(4 * math.pi * math.exp(-1.0))


def test_qplus_methods(capsys, tmp_path):
    want = 4 * math.pi**2.5
    for method in ("direct", "carleman"):
        code, out, _ = run(capsys, "qplus", "--method", method, "--g", "gaussian:1", "--v", "0,0,0",
                           "--format", "json")
        assert code == 0 and json.loads(out)["value"] == pytest.approx(want, rel=1e-6)
    grid = tmp_path / "q.bgf"
    code, out, _ = run(capsys, "qplus", "--method", "bobylev", "--g", "gaussian:1", "--v", "0,0,0",
                       "--N", "32", "--L", "6", "--grid-out", str(grid), "--format", "json")
    assert code == 0 and json.loads(out)["value"] == pytest.approx(want, rel=1e-4)
    assert GridFunction.load(grid).N == 32
    code, _, err = run(capsys, "qplus", "--method", "bobylev", "--lambda", "1", "--g", "gaussian:1",
                       "--v", "0,0,0")
    assert code == 2 and "lambda" in err


def test_norms(capsys):
    code, out, _ = run(capsys, "norm", "--f", "gaussian:1", "--p", "1", "--lambda", "1", "--format", "json")
    assert code == 0 and json.loads(out)["value"] == pytest.approx(math.pi**1.5 + 2 * math.pi, rel=1e-8)
    code, out, _ = run(capsys, "norm", "--f", "indicator:0,1", "--p", "1", "--radial", "--format", "json")
    assert json.loads(out)["value"] == pytest.approx(2 / 3)
    code, out, _ = run(capsys, "norm", "--f", "gaussian:1", "--p", "2", "--format", "json")
    assert json.loads(out)["value"] == pytest.approx((math.pi / 2) ** 0.75, rel=1e-8)
    code, _, _ = run(capsys, "norm", "--f", "gaussian:1", "--p", "1", "--lambda", "1", "--alpha", "1")
    assert code == 2


def test_verify_lemma23_and_thm1(capsys):
    code, out, _ = run(capsys, "verify", "lemma23")
    assert code == 0 and out.startswith("lemma23: pass")
    code, out, _ = run(capsys, "verify", "thm1", "--method", "radial", "--sphere-order", "10")
    assert code == 0 and "ratio=" in out


def test_verify_thm2_example(capsys):
    code, out, _ = run(capsys, "verify", "thm2", "--kernel", "constant:1", "--n", "3", "--lambda", "1",
                       "--p", "1", "--q", "1", "--r", "1", "--g", "gaussian:1", "--h", "gaussian:1")
    assert code == 0 and out.startswith("thm2: pass")


def test_precondition_and_usage_errors(capsys):
    code, _, err = run(capsys, "verify", "thm2", "--p", "2", "--q", "2", "--r", "inf")
    assert code == 2 and "precondition violation" in err
    code, _, err = run(capsys, "verify", "thm1", "--p", "1", "--q", "inf")
    assert code == 2 and "precondition violation" in err
    assert run(capsys, "beta", "--x", "0")[0] == 2
    assert run(capsys, "beta", "--kernel", "wobble:1", "--x", "0", "--y", "0")[0] == 2
    assert run(capsys, "op-p", "--g", "cube:1", "--h", "gaussian:1", "--k", "1,0,0")[0] == 2
    assert run(capsys, "op-p", "--g", "gaussian:1", "--h", "gaussian:1", "--k", "1,0")[0] == 2
    assert run(capsys)[0] == 2


def test_numerical_failure_exit_code(capsys):
    code, _, err = run(capsys, "norm", "--f", "power:1,-2,1", "--p", "1", "--radial")
    assert code == 3 and "numerical failure" in err


def test_sharpness(capsys):
    code, out, _ = run(capsys, "sharpness", "--eps", "0.1,0.01", "--format", "csv")
    lines = out.splitlines()
    assert code == 0 and len(lines) == 3 and lines[0].startswith("eps,norm,beta_eps,ratio")


def test_sweep_is_deterministic(tmp_path, capsys, monkeypatch):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"sweeps": [
        {"check": "lemma23", "exponents": [[2, 2], [4, 4]], "alpha": [0, -1]},
        {"check": "lemma22", "exponents": [[3, 3, 3]], "seed": [1, 2], "rotations": 512,
         "sphere_order": 8, "quad": {"radial_order": 12}},
    ]}))
    hashes = []
    for i, threads in enumerate(["1", "2"]):
        monkeypatch.setenv("BG_THREADS", threads)
        out = tmp_path / f"run{i}.csv"
        code, _, _ = run(capsys, "sweep", "--config", str(cfg), "--format", "csv", "--out", str(out))
        assert code == 0
        hashes.append(hashlib.sha256(out.read_bytes()).hexdigest())
    assert hashes[0] == hashes[1]
    rows = out.read_text().splitlines()
    assert len(rows) == 7 and rows[-1].split(",")[-2] == "2"


def test_sweep_config_errors(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text('{"sweeps": [{"check": "thm9"}]}')
    code, _, err = run(capsys, "sweep", "--config", str(cfg))
    assert code == 2 and "thm9" in err
    code, _, err = run(capsys, "sweep", "--config", str(tmp_path / "none.json"))
    assert code == 2 and "none.json" in err


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "boltzgain", "cutoff", "--format", "csv"],
                         capture_output=True, text=True, check=True)
    assert res.stdout.splitlines()[1].startswith("3,constant:1,12.566370614359")

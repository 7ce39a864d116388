import json
import subprocess
import sys

import pytest

from fh2lab.cli import main


@pytest.fixture
def files(tmp_path):
    (tmp_path / "toffoli3.hc1q").write_text("model hc1q\nqubits 3\ntoffoli 1 2 3\n")
    (tmp_path / "x_then_h.gen").write_text("model general\nqubits 2\nx 1\n")
    (tmp_path / "id.hc1q").write_text("model hc1q\nqubits 3\n")
    (tmp_path / "x3.hc1q").write_text("model hc1q\nqubits 3\nx 3\n")
    return tmp_path


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def result(capsys, *argv):
    code, out, err = run(capsys, *argv, "--deterministic")
    assert code == 0, err
    return json.loads(out)


def test_prob(files, capsys):
    doc = result(capsys, "prob", "--circuit", files / "toffoli3.hc1q", "--z", "000")
    assert doc["result"] == {"p": 0.5625}
    assert doc["seed"] == 0 and "version" in doc and "generator" in doc
    assert "timestamp" not in doc


def test_timestamp_without_deterministic(files, capsys):
    code, out, _ = run(capsys, "prob", "--circuit", files / "toffoli3.hc1q", "--z", "000")
    assert code == 0 and "timestamp" in json.loads(out)


def test_paths(files, capsys):
    doc = result(capsys, "paths", "--circuit", files / "x_then_h.gen", "--y", "10")
    assert doc["result"] == {"s": 1, "z": "10"}
    doc = result(capsys, "paths", "--circuit", files / "x_then_h.gen")
    assert [p["s"] for p in doc["result"]["paths"]] == [0, 0, 1, 1]
    assert doc["result"]["state"] == [[0.5, 0.0], [0.5, 0.0], [-0.5, 0.0], [-0.5, 0.0]]


def test_sim_and_estimate(files, capsys):
    doc = result(capsys, "sim", "--circuit", files / "toffoli3.hc1q")
    assert doc["result"]["probabilities"]["000"] == pytest.approx(0.5625)
    doc = result(capsys, "estimate", "--circuit", files / "toffoli3.hc1q", "--z", "000", "--seed", 4)
    assert doc["result"]["T"] == 26492
    assert abs(doc["result"]["p"] - 0.5625) <= 0.02


def test_compile_writes_sidecar(files, capsys):
    out = files / "compiled.hc1q"
    doc = result(capsys, "compile", "--circuit", files / "x_then_h.gen", "--out", out)
    assert doc["result"]["width"] == 6 and doc["result"]["success_probability"] == 0.015625
    assert out.read_text().startswith("model hc1q\nqubits 6\n")
    assert "out 1\nout 2\n" in (files / "compiled.hc1q.post").read_text()


def test_marginal_lines_and_table(files, capsys):
    code, out, _ = run(capsys, "marginal", "--circuit", files / "toffoli3.hc1q", "--k", "1",
                       "--samples", "7")
    assert code == 0 and len(out.splitlines()) == 7 and set(out.split()) <= {"0", "1"}
    doc = result(capsys, "marginal", "--circuit", files / "toffoli3.hc1q", "--k", "1", "--table")
    q = doc["result"]["q"]
    assert sum(q.values()) == pytest.approx(1) and abs(q["0"] - 0.75) < 0.1


def test_pdd_workflow(files, capsys):
    inst = files / "inst.json"
    result(capsys, "pdd-make", "--u1", files / "id.hc1q", "--u2", files / "x3.hc1q",
           "--a", "0.9", "--b", "0.1", "--out", inst)
    assert json.loads(inst.read_text())["u1"] == "id.hc1q"
    doc = result(capsys, "pdd-arthur", "--instance", inst, "--z", "000", "--k", "5", "--seed", "1")
    assert doc["result"]["transcript"]["T"] == 1000 and doc["result"]["accepted"]
    doc = result(capsys, "pdd-merlin", "--instance", inst, "--seed", "2")
    assert doc["result"]["z"] in ("000", "001")
    doc = result(capsys, "pdd-run", "--instance", inst, "--k", "5", "--trials", "20")
    assert doc["result"]["accepted"] == 20
    doc = result(capsys, "pdd-decide", "--instance", inst, "--k", "5")
    assert doc["result"]["accepted"]


def test_pdd_reduce(files, capsys):
    out_dir = files / "red"
    doc = result(capsys, "pdd-reduce", "--circuit", files / "x_then_h.gen", "--r", "3", "--m", "3",
                 "--out-dir", out_dir)
    assert doc["result"]["width"] == 6
    doc = result(capsys, "pdd-decide", "--instance", out_dir / "instance.json", "--k", "5")
    assert not doc["result"]["accepted"]


def test_exit_codes(files, capsys):
    assert run(capsys, "prob", "--circuit", files / "missing", "--z", "0")[0] == 2
    bad = files / "bad.hc1q"
    bad.write_text("model hc1q\nqubits 3\nh 1\n")
    code, _, err = run(capsys, "prob", "--circuit", bad, "--z", "000")
    assert code == 2 and "line 3" in err and len(err.strip().splitlines()) == 1
    code, _, err = run(capsys, "marginal", "--circuit", files / "toffoli3.hc1q", "--k", "2",
                       "--r", "1000", "--budget", "10")
    assert code == 3 and "budget" in err
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["prob", "--circuit", "x", "--z", "0", "--seed", str(2**64)])
    assert exc.value.code == 2


def test_byte_identical_runs(files):
    cmd = [sys.executable, "-m", "fh2lab.cli", "estimate", "--circuit", str(files / "toffoli3.hc1q"),
           "--z", "000", "--seed", "77", "--deterministic"]
    first = subprocess.run(cmd, capture_output=True, check=True).stdout
    second = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert first == second and first


def test_threads_do_not_change_output(files, capsys):
    base = ["estimate", "--circuit", files / "toffoli3.hc1q", "--z", "000", "--epsilon", "0.004"]
    one = result(capsys, *base, "--threads", "1")["result"]
    two = result(capsys, *base, "--threads", "2")["result"]
    assert one == two

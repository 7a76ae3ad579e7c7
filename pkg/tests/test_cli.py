import csv
import io
import json

import numpy as np
import pytest

import scarlab.cli as cli
from scarlab.cli import RunConfig, main


def table(text):
    lines = [l for l in text.splitlines() if not l.startswith("#")]
    rows = list(csv.reader(io.StringIO("\n".join(lines))))
    return rows[0], np.array([[float(x) for x in r] for r in rows[1:]])


def run(tmp_path, name, *args):
    out = tmp_path / name
    code = main([*args, "--out", str(out)])
    return code, out.read_text() if out.exists() else ""


def test_usage_errors_exit_2(capsys):
    assert main(["spectrum", "--L", "1"]) == 2
    assert main(["spectrum", "--side", "ising", "--k", "3"]) == 2
    assert main(["echo", "--times", "5:1:10"]) == 2
    assert main(["bogus"]) == 2
    assert main(["echo", "--evolution", "subspace", "--L", "4"]) == 2


def test_outputs_are_byte_identical(tmp_path):
    args = ["spectrum", "--L", "3", "--g", "0.9"]
    c1, a = run(tmp_path, "a.csv", *args)
    c2, b = run(tmp_path, "b.csv", *args)
    assert c1 == c2 == 0
    assert a == b
    header = json.loads(a.splitlines()[0][2:])
    assert header["L"] == 3 and "out" not in header


def test_config_file_and_flag_override(tmp_path):
    conf = tmp_path / "run.json"
    conf.write_text(json.dumps({"command": "spectrum", "L": 3, "g": 0.5}))
    code, text = run(tmp_path, "o.csv", "spectrum", "--config", str(conf), "--g", "1.5")
    assert code == 0
    header = json.loads(text.splitlines()[0][2:])
    assert header["g"] == 1.5 and header["L"] == 3


def test_spectrum_marks_scars(tmp_path):
    code, text = run(tmp_path, "s.csv", "spectrum", "--L", "3", "--g", "0.9")
    cols, data = table(text)
    assert cols == ["index", "energy", "S_dist", "S_symm", "S_total", "is_scar"]
    assert data.shape[0] == 32
    scars = data[data[:, 5] == 1]
    assert len(scars) == 12
    assert np.all(scars[:, 2] <= 1e-10)


def test_momentum_path_matches_dense(monkeypatch):
    cfg = RunConfig(command="spectrum", L=5, g=0.9)
    dense = table(cli.cmd_spectrum(cfg)[0])[1]
    monkeypatch.setattr(cli, "MOMENTUM_THRESHOLD", 100)
    blocks = table(cli.cmd_spectrum(cfg)[0])[1]
    assert np.allclose(dense[:, 1], blocks[:, 1], atol=1e-10)
    assert dense[:, 5].sum() == blocks[:, 5].sum() == 20
    assert np.allclose(dense[dense[:, 5] == 1, 1], blocks[blocks[:, 5] == 1, 1], atol=1e-10)


def test_echo_subspace_matches_hamiltonian(tmp_path):
    base = ["echo", "--L", "5", "--times", "0:10:21", "--label", "2,3"]
    _, a = run(tmp_path, "h.csv", *base)
    _, b = run(tmp_path, "s.csv", *base, "--evolution", "subspace")
    ta, tb = table(a)[1], table(b)[1]
    assert np.max(np.abs(ta[:, 1:3] - tb[:, 1:3])) < 1e-9


def test_circuit_echo_is_seeded(tmp_path):
    base = ["echo", "--L", "3", "--evolution", "circuit", "--layers", "10"]
    _, a = run(tmp_path, "a.csv", *base, "--seed", "4")
    _, b = run(tmp_path, "b.csv", *base, "--seed", "4")
    _, c = run(tmp_path, "c.csv", *base, "--seed", "5")
    assert a == b and a != c
    cols, data = table(a)
    assert cols[0] == "s" and data.shape == (11, 4)
    assert np.all(data[:, 3] <= 1 + 1e-12)


def test_entanglement_dynamics_json(tmp_path):
    code, text = run(tmp_path, "e.json", "entanglement-dynamics", "--L", "3", "--times", "0:2:3", "--format", "json")
    assert code == 0
    doc = json.loads(text)
    assert doc["config"]["command"] == "entanglement-dynamics"
    assert len(doc["rows"]) == 3


def test_observables_nonscar(tmp_path):
    code, text = run(tmp_path, "o.csv", "observables", "--L", "3", "--state", "nonscar", "--times", "0:1:3")
    assert code == 0
    cols, data = table(text)
    assert cols[0] == "t" and data.shape[0] == 3
    assert np.all(np.abs(data[:, 1:]) <= 1 + 1e-12)


@pytest.mark.parametrize("L", [3, 4])
def test_verify_passes(tmp_path, L):
    code, text = run(tmp_path, "v.json", "verify", "--L", str(L))
    assert code == 0
    report = json.loads(text)
    assert report["pass"] and report["checks"]


def test_verify_injected_fault_fails(tmp_path):
    code, text = run(tmp_path, "v.json", "verify", "--L", "3", "--inject-fault")
    assert code == 1
    report = json.loads(text)
    assert not report["checks"]["effective_h_mismatch"]["pass"]

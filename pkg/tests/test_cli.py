
import os

import pytest

from witten_lab.cli import main
from witten_lab.output import read_json

def run(tmp_path, *args):
    return main(list(args) + ["--out", str(tmp_path)])

def test_version(capsys):

    with pytest.raises(SystemExit) as e:
        main(["--version"])

    assert(e.value.code == 0)

def test_spectrum(tmp_path, capsys):

    rc = run(tmp_path, "spectrum", "--model", "circle", "--n", "64",
             "--t", "0.5", "--k", "3")

    assert(rc == 0)

    with open(tmp_path / "spectrum-p0.csv") as f:
        lines = f.read().splitlines()
    assert(lines[0] == "degree,t,index,lambda,t_lambda,residual")
    assert(len(lines) == 4)

    assert("Kernel dimension 1 (gap)" in capsys.readouterr().out)

def test_flow_deterministic(tmp_path):

    args = ["flow", "--model", "circle", "--n", "64", "--t-grid",
            "list:1.0,0.5,0.25", "--k", "3", "--workers", "2"]

    assert(run(tmp_path / "a", *args) == 0)
    assert(run(tmp_path / "b", *args) == 0)

    a = read_json(str(tmp_path / "a" / "flow.json"))
    b = read_json(str(tmp_path / "b" / "flow.json"))
    del a["config"]["output"], b["config"]["output"]

    assert(a == b)
    assert(a["oracle"]["0"]["limits"] == [0.0, 2.0, 2.0])
    assert(os.path.exists(tmp_path / "a" / "plots" / "flow-p0-track2.dat"))

def test_morse_check(tmp_path):

    rc = run(tmp_path, "morse-check", "--model", "torus", "--n", "16",
             "--field", "sum-cos")
    assert(rc == 0)

    d = read_json(str(tmp_path / "morse.json"))
    assert(d["report"]["C"] == [1, 2, 1])
    assert(d["report"]["b"] == [1, 2, 1])
    assert(d["report"]["pass"] is True)

def test_morse_check_mesh(tmp_path, octahedron_path):

    rc = run(tmp_path, "morse-check", "--model", "mesh:" + octahedron_path,
             "--field", "height")
    assert(rc == 0)

    d = read_json(str(tmp_path / "morse.json"))
    assert(d["report"]["C"] == [1, 0, 1])

def test_oracle_modes(tmp_path):

    assert(run(tmp_path / "s", "oracle", "--xi", "1") == 0)
    assert(run(tmp_path / "p", "oracle", "--xi", "1", "--oracle-mode",
               "paper") == 0)

    std = read_json(str(tmp_path / "s" / "oracle.json"))["degrees"]["0"]
    half = read_json(str(tmp_path / "p" / "oracle.json"))["degrees"]["0"]

    assert(half["mode"] == "paper")
    assert([v / 2 for v, m in std["entries"]] == [0, 1, 2, 3])
    assert([v for v, m in half["entries"]][:4] == [0, 1, 2, 3])

def test_oracle_brute_force(tmp_path):

    assert(run(tmp_path, "oracle", "--xi", "2,-1", "--brute-force") == 0)

    d = read_json(str(tmp_path / "oracle.json"))
    assert(sorted(d["brute_force"]) == ["0", "1", "2"])
    assert(d["brute_force"]["1"]["provenance"] == "brute-force")

def test_exit_codes(tmp_path, capsys):

    assert(run(tmp_path, "spectrum", "--field", "nope") == 2)
    assert("error: invalid-argument" in capsys.readouterr().err)

    assert(run(tmp_path, "spectrum", "--oracle-mode", "exact") == 2)

    assert(run(tmp_path, "spectrum", "--model", "circle", "--field",
               "sum-cos") == 2)

    assert(run(tmp_path, "oracle", "--xi", "1,x") == 2)

    assert(run(tmp_path, "spectrum", "--model", "circle", "--n", "8",
               "--t", "0.001") == 3)
    assert("error: overflow-guard" in capsys.readouterr().err)

    assert(run(tmp_path, "morse-check", "--field", "constant") == 3)

def test_argument_exit_codes(tmp_path, capsys):

    assert(run(tmp_path, "foliation", "--slope", "2/2") == 2)
    assert("not coprime" in capsys.readouterr().err)

    assert(run(tmp_path, "spectrum", "--model", "circle", "--n", "8",
               "--t", "0.5", "--k", "8") == 2)
    assert("k must satisfy" in capsys.readouterr().err)

    assert(run(tmp_path, "flow", "--model", "circle", "--n", "16",
               "--t-grid", "list:") == 2)
    assert("empty t schedule" in capsys.readouterr().err)

    missing = str(tmp_path / "missing.off")
    assert(run(tmp_path, "morse-check", "--model", "mesh:" + missing,
               "--field", "height") == 2)
    assert("cannot read mesh file" in capsys.readouterr().err)

def test_foliation_overflow_names_leaf(tmp_path, capsys):

    rc = run(tmp_path, "foliation", "--slope", "1/0", "--n-leaf", "64",
             "--n-trans", "16", "--field", "tilted", "--epsilon", "0",
             "--t-grid", "list:0.001")

    assert(rc == 3)
    assert("leaf with intercept" in capsys.readouterr().err)

def test_foliation(tmp_path):

    rc = run(tmp_path, "foliation", "--slope", "1/0", "--n-leaf", "64",
             "--n-trans", "16", "--field", "tilted", "--epsilon", "0",
             "--t-grid", "list:0.2,0.1")
    assert(rc == 0)

    d = read_json(str(tmp_path / "foliation.json"))
    assert(d["c"] == [1.0, 1.0])
    assert(d["beta"] == [1.0, 1.0])
    assert(d["pass"] is True)
    assert(d["transversality"]["pass"] is True)
    assert(abs(d["hessian_integral"] - 2) < 1e-9)
    assert(sorted(d["traces"]) == ["0", "1"])

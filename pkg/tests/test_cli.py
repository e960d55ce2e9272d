import json

import numpy as np
import pytest

from addcomb.cli import main
from addcomb.groups import DenseFn, GroupSpec, PartialMap, set_to_json
from addcomb.nil import BracketPhase
from addcomb.quadratic import LinearFormFamily, QuadFormFp, QuadPolyF2


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr().out.strip().splitlines()
    return code, json.loads(out[-1]) if out else None


def dump(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return path


def test_version(capsys):
    with pytest.raises(SystemExit):
        main(["--version"])
    assert capsys.readouterr().out.startswith("addcomb ")


def test_fft_and_gowers(tmp_path, capsys):
    f = dump(tmp_path, "f.json", DenseFn(GroupSpec.vector(2, 3), np.ones(8)).to_json())
    code, out = run(capsys, "fft", "--in", f)
    assert code == 0 and out["coefficients"][0][0] == pytest.approx(1)
    code, out = run(capsys, "gowers", "--in", f, "--k", 3, "--method", "naive")
    assert out["norm"] == pytest.approx(1) and "runtime_ms" in out


def test_sieve_check(tmp_path, capsys):
    f = dump(tmp_path, "f.json", [1.0] * 10)
    th = dump(tmp_path, "t.json", [0.0])
    code, out = run(capsys, "sieve-check", "--in", f, "--thetas", th, "--delta", 0.5)
    assert code == 0 and out["lhs"] == pytest.approx(100) and out["rhs"] == pytest.approx(120)


def test_freiman_check(tmp_path, capsys):
    G = GroupSpec.cyclic(10)
    m = dump(tmp_path, "m.json", PartialMap(G, G, {0: 0, 1: 1, 2: 2, 3: 4}).to_json())
    code, out = run(capsys, "freiman-check", "--map", m)
    assert out["ok"] is False and out["witness"] == [1, 2, 0, 3]


def test_dense_model(tmp_path, capsys):
    s = dump(tmp_path, "s.json", set_to_json([0, 1, 2, 4, 8], GroupSpec.vector(2, 10)))
    code, out = run(capsys, "dense-model", "--set", s)
    assert out["model_dim"] == 4


def test_approx_group(tmp_path, capsys):
    s = dump(tmp_path, "s.json", {"integers": list(range(-5, 6))})
    code, out = run(capsys, "approx-group", "--set", s, "--K", 3)
    assert code == 0 and out["verdict"] == "yes_certified"
    s = dump(tmp_path, "t.json", set_to_json([1, 2], GroupSpec.cyclic(9)))
    code, out = run(capsys, "approx-group", "--set", s, "--K", 3)
    assert code == 1 and out["verdict"] == "no_certified"


def test_bohr(capsys):
    code, out = run(capsys, "bohr", "--M", 8, "--freqs", "1", "--radii", "1/4")
    assert out["elements"] == [0, 1, 2, 6, 7]
    code, out = run(capsys, "bohr", "--M", 101, "--freqs", "3,7", "--radii", "1/5,1/5", "--to-gap")
    assert out["size"] >= 101 / 100


def test_sublevel(capsys):
    code, out = run(capsys, "sublevel", "--box", "200", "--alpha", "0.37", "--eps", "0.1", "--zero", 100)
    assert code == 0 and out["size"] >= 1


def test_quad_split(tmp_path, capsys):
    U = np.zeros((4, 4), dtype=int)
    U[0, 2] = U[1, 3] = 1
    p = dump(tmp_path, "p.json", QuadPolyF2(4, U, np.zeros(4)).to_json())
    code, out = run(capsys, "quad-split", "--psi", p, "--n", 2, "--N", 2)
    assert out["psi"] == [[1, 0], [0, 1]]


def test_rank_line(tmp_path, capsys):
    A = np.zeros((3, 3), dtype=int)
    A[0, 0] = 1
    fam = dump(tmp_path, "f.json", LinearFormFamily(5, 1, 3, (QuadFormFp(5, A),)).to_json())
    s = dump(tmp_path, "s.json", [1, 2, 3])
    code, out = run(capsys, "rank-line", "--family", fam, "--set", s, "--r", 1)
    assert out["V"] == [[1, 0, 0]] and out["quadruples"]["count"] >= 1


def test_lift_and_extract(tmp_path, capsys):
    G, H = GroupSpec.vector(2, 2), GroupSpec.vector(2, 2)
    m = dump(tmp_path, "m.json", PartialMap(G, H, {0: 1, 1: 3, 3: 2}).to_json())
    code, out = run(capsys, "lift", "--map", m, "--verify")
    assert out["u3"] >= 0.75 - 1e-9
    code, out = run(capsys, "extract", "--map", m, "--search")
    assert out["agreement"] == [0, 1, 3]


def test_lift_z(tmp_path, capsys):
    m = dump(tmp_path, "m.json",
             PartialMap(GroupSpec.cyclic(12), GroupSpec.cyclic(3), {1: 1, 2: 2}).to_json())
    code, out = run(capsys, "lift", "--map", m, "--ambient", "z", "--verify")
    assert out["u3"] >= (2 / 3) / 4


def test_bracket_and_correlate(tmp_path, capsys):
    ph = dump(tmp_path, "ph.json", BracketPhase(deltas=["1/2"], etas=["1/2"]).to_json())
    code, out = run(capsys, "bracket", "--phase", ph, "--range", 2)
    assert out["values"][1][1] == pytest.approx(1)
    f = dump(tmp_path, "f.json", DenseFn(GroupSpec.cyclic(6), np.ones(6)).to_json())
    code, out = run(capsys, "correlate", "--f", f, "--phase", dump(tmp_path, "z.json", {}))
    assert out["magnitude"] == pytest.approx(1)


def test_run(tmp_path, capsys):
    out = tmp_path / "r.jsonl"
    code = main(["run", "--suite", "sieve", "--seed", "1", "--instances", "3", "--out", str(out)])
    assert code == 0 and len(out.read_text().splitlines()) == 4


def test_bad_input_exit_code(capsys):
    assert main(["bohr", "--M", "8", "--freqs", "1", "--radii", "1/2"]) == 2

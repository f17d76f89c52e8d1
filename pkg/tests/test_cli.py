from __future__ import annotations

import csv
import subprocess
import sys

import pytest

from slpinterp.cli import main


def run(*args, cwd=None):
    return subprocess.run([sys.executable, "-m", "slpinterp", *args], capture_output=True, text=True, cwd=cwd)


def test_constant_circuit(tmp_path, capsys):
    (tmp_path / "c.slp").write_text("slp n=3\nconst 5\n")
    assert main(["interp", "--circuit", str(tmp_path / "c.slp"), "--degree-bound", "2", "--term-bound", "1"]) == 0
    out = capsys.readouterr()
    assert out.out == "poly n=3\n5 0 0 0\n"
    assert "probes=" in out.err


@pytest.mark.parametrize("ring", ["int", "zmod:101"])
def test_gen_then_interp_is_byte_identical(tmp_path, ring):
    base = tmp_path / "inst"
    r = run("gen", "--nvars", "3", "--degree-bound", "64", "--term-bound", "15", "--seed", "5",
            "--ring", ring, "--out", str(base))
    assert r.returncode == 0, r.stderr
    outs = {}
    for algo in ("kron", "mpolysi"):
        out = tmp_path / f"{algo}.poly"
        r = run("interp", "--circuit", f"{base}.slp", "--degree-bound", "64", "--term-bound", "15",
                "--ring", ring, "--algo", algo, "--out", str(out))
        assert r.returncode == 0, r.stderr
        outs[algo] = out.read_bytes()
    assert outs["kron"] == outs["mpolysi"] == (tmp_path / "inst.poly").read_bytes()


def test_uipoly_on_univariate(tmp_path, capsys):
    assert main(["gen", "--nvars", "1", "--degree-bound", "1000", "--term-bound", "9", "--out",
                 str(tmp_path / "u")]) == 0
    assert main(["interp", "--circuit", str(tmp_path / "u.slp"), "--degree-bound", "1000", "--term-bound", "9",
                 "--algo", "uipoly", "--out", str(tmp_path / "r.poly")]) == 0
    assert (tmp_path / "r.poly").read_text() == (tmp_path / "u.poly").read_text()


def test_uipoly_rejects_multivariate(tmp_path):
    (tmp_path / "m.slp").write_text("slp n=2\nin 1\nin 2\nmul 1 2\n")
    assert main(["interp", "--circuit", str(tmp_path / "m.slp"), "--degree-bound", "3", "--term-bound", "1",
                 "--algo", "uipoly"]) == 1


def test_parse_error_exit_code(tmp_path):
    (tmp_path / "bad.slp").write_text("slp n=2\nmul 1 2\n")
    r = run("interp", "--circuit", str(tmp_path / "bad.slp"), "--degree-bound", "4", "--term-bound", "1")
    assert r.returncode == 2
    assert "line 2" in r.stderr


def test_usage_exit_code():
    assert run("interp", "--circuit", "x.slp").returncode == 1
    assert run("interp", "--circuit", "x.slp", "--degree-bound", "1", "--term-bound", "1").returncode == 1
    assert run("interp", "--circuit", "x.slp", "--degree-bound", "4", "--term-bound", "1",
               "--ring", "zmod:1").returncode == 1
    assert run("frobnicate").returncode == 1
    assert run().returncode == 1


def test_missing_file_is_usage_error(tmp_path):
    assert main(["interp", "--circuit", str(tmp_path / "nope.slp"), "--degree-bound", "4",
                 "--term-bound", "1"]) == 1


def test_bound_violation_exit_code(tmp_path):
    base = tmp_path / "inst"
    assert main(["gen", "--nvars", "2", "--degree-bound", "40", "--term-bound", "30", "--out", str(base)]) == 0
    r = run("interp", "--circuit", f"{base}.slp", "--degree-bound", "40", "--term-bound", "3")
    assert r.returncode == 3
    assert "interpolation failed" in r.stderr


def test_stdin_circuit(tmp_path):
    r = subprocess.run([sys.executable, "-m", "slpinterp", "interp", "--circuit", "-", "--degree-bound", "3",
                        "--term-bound", "2"], input="slp n=1\nin 1\nmul 1 1\nconst -4\nadd 2 3\n",
                       capture_output=True, text=True)
    assert r.returncode == 0
    assert r.stdout == "poly n=1\n-4 0\n1 2\n"


def test_bench_csv(tmp_path):
    out = tmp_path / "b.csv"
    r = run("bench", "--algo", "kron", "--vary", "T", "--values", "8,16,24,32", "--nvars", "3",
            "--degree-bound", str(2**12), "--reps", "2", "--csv", str(out))
    assert r.returncode == 0, r.stderr
    rows = list(csv.DictReader(out.open(newline="")))
    assert len(rows) == 8
    assert list(rows[0]) == ["algo", "n", "D", "T", "seed", "rep", "wall_time", "probes", "max_probe_degree",
                             "ring_ops"]
    assert [int(r["T"]) for r in rows] == [8, 8, 16, 16, 24, 24, 32, 32]
    assert "R^2=" in r.stderr
    assert out.read_bytes().count(b"\r\n") == 9


def test_bench_rows_stable_except_time(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        assert main(["bench", "--vary", "D", "--values", "16,256", "--nvars", "2", "--term-bound", "6",
                     "--csv", str(path)]) == 0

    def strip(path):
        return [{k: v for k, v in row.items() if k != "wall_time"} for row in csv.DictReader(path.open())]

    assert strip(a) == strip(b)


def test_selftest_passes():
    r = run("selftest", "--scale", "1")
    assert r.returncode == 0, r.stdout
    assert "invariants hold" in r.stdout


def test_selftest_fault_injection_names_invariant():
    r = run("selftest", "--scale", "1", "--inject-fault", "primes")
    assert r.returncode == 3
    assert "FAIL prime_table" in r.stdout
    assert "failed: prime_table" in r.stdout

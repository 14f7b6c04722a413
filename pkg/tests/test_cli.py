import subprocess
import sys

import pytest

from vandercond.cli import main
from vandercond.nodes import read_nodes


@pytest.fixture
def nodes_file(tmp_path):
    path = tmp_path / "nodes.txt"
    assert main(["gen", "--kind", "one-pair", "--m", "6", "--seed", "3", "--out", str(path)]) == 0
    return path


def test_gen_writes_node_file(nodes_file):
    ns = read_nodes(nodes_file)
    assert ns.M == 6 and ns.N == 61


@pytest.mark.parametrize("kind,args", [("pairwise", ["--m", "4", "--c", "2"]), ("compare-bdgy", []),
                                       ("compare-lili", ["--m", "4"])])
def test_gen_kinds_to_stdout(kind, args, capsys):
    assert main(["gen", "--kind", kind, "--seed", "0x10"] + args) == 0
    out = capsys.readouterr().out
    assert out.startswith("# N=")


def test_gen_precondition_exit_code(capsys):
    assert main(["gen", "--kind", "one-pair", "--m", "2"]) == 2
    assert main(["gen", "--kind", "pairwise"]) == 2
    assert "error" in capsys.readouterr().err


def test_bad_seed_is_usage_error():
    with pytest.raises(SystemExit) as info:
        main(["gen", "--kind", "compare-bdgy", "--seed", "-1"])
    assert info.value.code == 2


def test_cond_modes(nodes_file, capsys):
    assert main(["cond", "--nodes", str(nodes_file)]) == 0
    dd = dict(line.split() for line in capsys.readouterr().out.splitlines())
    assert dd["mode"] == "gram-dd" and dd["M"] == "6"
    assert len(dd["cond"].split("e")[0].replace(".", "").lstrip("0")) >= 34
    assert main(["cond", "--nodes", str(nodes_file), "--mode", "svd-f64"]) == 0
    f64 = dict(line.split() for line in capsys.readouterr().out.splitlines())
    if float(dd["cond"]) < 1e4:
        assert float(f64["cond"]) == pytest.approx(float(dd["cond"]), rel=1e-10)


def test_cond_missing_file(tmp_path, capsys):
    assert main(["cond", "--nodes", str(tmp_path / "none.txt")]) == 2


def test_bounds_table(nodes_file, capsys):
    assert main(["bounds", "--nodes", str(nodes_file)]) == 0
    out = capsys.readouterr().out
    assert out.startswith("class one-pair")
    assert "onepair_cond" in out and "lower_cond_exact" in out


def test_experiment_command(tmp_path, capsys):
    code = main(["experiment", "--kind", "one-pair", "--m", "5", "--trials", "3", "--workers", "1",
                 "--out", str(tmp_path)])
    assert code == 0
    assert (tmp_path / "one-pair-M5.csv").exists() and (tmp_path / "one-pair-M5.svg").exists()
    assert main(["experiment", "--kind", "fig-crho", "--resolution", "20", "--out", str(tmp_path)]) == 0
    assert main(["experiment", "--kind", "pairwise", "--m", "5", "--out", str(tmp_path)]) == 2


def test_experiment_solver_failure_exit_code(tmp_path, monkeypatch):
    import vandercond.experiments as ex
    from vandercond.errors import SolverError

    def boom(ns, mode):
        raise SolverError("no convergence")

    monkeypatch.setattr(ex, "spectral_summary", boom)
    code = main(["experiment", "--kind", "one-pair", "--m", "4", "--trials", "2", "--workers", "1",
                 "--out", str(tmp_path)])
    assert code == 3


def test_selftest_small(capsys):
    assert main(["selftest", "--samples", "50", "--grid", "200", "--schur", "4"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert len(out) == 8 and all(line.startswith("PASS") for line in out)


def test_console_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "vandercond.cli", "gen", "--kind", "compare-bdgy"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.startswith("# N=1001 M=3")

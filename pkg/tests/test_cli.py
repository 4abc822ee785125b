import io
import subprocess
import sys

import pytest

from helpers import FIXTURES
from stratiter.cli import main


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def test_solve_ssg_above():
    code, out = run("solve-ssg", str(FIXTURES / "eps_sink.ssg"))
    assert code == 0
    lines = out.splitlines()
    assert lines[:5] == ["1    1", "eps  1/4", "av   1/4", "max  1/4", "min  1/4"]
    assert "strategy[min] min -> av" in lines
    assert lines[-1] == "iterations 1"


def test_solve_ssg_below_with_trace():
    code, out = run("solve-ssg", str(FIXTURES / "eps_sink.ssg"), "--below", "--trace")
    assert code == 0
    assert "strategy[max] max -> eps" in out
    assert "iter 0: strategy max->av" in out
    assert "iter 1: strategy max->eps" in out


def test_solve_ssg_trace_shows_skip():
    code, out = run("solve-ssg", str(FIXTURES / "eps_sink.ssg"), "--trace")
    assert "skip cycle {av,max,min} delta 3/4" in out


def test_random_init_gives_same_values():
    base = run("solve-ssg", str(FIXTURES / "eps_sink.ssg"))[1].splitlines()[:5]
    for seed in range(5):
        code, out = run("solve-ssg", str(FIXTURES / "eps_sink.ssg"), "--random-init", str(seed))
        assert code == 0 and out.splitlines()[:5] == base


@pytest.mark.parametrize("flag", ["--kleene", "--vi", "--above", "--below"])
def test_solve_energy(flag):
    code, out = run("solve-energy", str(FIXTURES / "four_states.eg"), flag)
    assert code == 0
    assert out.splitlines()[:4] == ["x  18", "y  17", "u  0", "v  8"]


def test_solve_energy_infinite_values():
    code, out = run("solve-energy", str(FIXTURES / "negative_cycle.eg"))
    assert code == 0
    assert "u  inf" in out and "v  3" in out and "x  inf" in out
    assert "strategy[player0] u -> sink" in out


def test_solve_energy_strategy_lines():
    code, out = run("solve-energy", str(FIXTURES / "four_states.eg"), "--below")
    assert "strategy[player1] x -> y" in out and "strategy[player1] y -> v" in out


def test_solve_pa():
    code, out = run("solve-pa", str(FIXTURES / "three_states.pa"))
    assert code == 0
    lines = out.splitlines()
    assert lines[0].split() == ["s", "t", "u"]
    assert lines[1].split() == ["s", "0", "0", "1"]
    assert "coupling s t: (b1,b1p) (b2,b2p)" in lines


def test_exit_codes(tmp_path):
    bad = tmp_path / "bad.ssg"
    bad.write_text("ssg\nstate a sink 0.5\n")
    assert run("solve-ssg", str(bad))[0] == 1
    assert run("solve-ssg", str(tmp_path / "missing.ssg"))[0] == 1
    inv = tmp_path / "inv.eg"
    inv.write_text("energy\nstate a 0\nstate b 0\nedge a b 1\n")
    assert run("solve-energy", str(inv))[0] == 2
    # right syntax, wrong kind of model
    assert run("solve-ssg", str(FIXTURES / "four_states.eg"))[0] == 1
    assert run("bench", "--n", "1")[0] == 2
    assert run("bench", "--n", "3", "--solvers", "XX")[0] == 2


def test_soundness_failure_exit_code(monkeypatch):
    from stratiter import cli
    from stratiter.nonexp import SoundnessError

    def boom(*args, **kwargs):
        raise SoundnessError("broken")

    monkeypatch.setattr(cli.ssg, "solve_ssg_above", boom)
    assert run("solve-ssg", str(FIXTURES / "eps_sink.ssg"))[0] == 3


def test_bench_output(tmp_path):
    code, out = run("bench", "--n", "6", "--runs", "3", "--seed", "2", "--no-time",
                    "--dump-dir", str(tmp_path))
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "n=6 p=1/3 W=6 seed=2 runs=3 agree=true"
    assert [ln.split()[0] for ln in lines[2:]] == ["TF", "KLE", "VI", "SI0", "SI1"]
    assert all(ln.split()[-1] == "true" for ln in lines[2:])
    again = run("bench", "--n", "6", "--runs", "3", "--seed", "2", "--no-time")[1]
    assert again == out


def test_bench_csv():
    code, out = run("bench", "--n", "4", "--runs", "2", "--csv", "--solvers", "kle,si0",
                    "--p", "1/2")
    assert code == 0
    rows = out.splitlines()
    assert rows[0] == "instance,solver,time,iterations,bound,agree"
    assert len(rows) == 1 + 2 * 2
    assert rows[1].startswith("0,KLE,") and rows[2].startswith("0,SI0,")


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "stratiter.cli", "solve-energy",
                          str(FIXTURES / "four_states.eg"), "--vi"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("x  18")

import os

import pytest

from greenroute.cli import main
from greenroute.encoding import decode
from greenroute.files import load_instance, read_solution, write_instance
from greenroute.model import evaluate

from helpers import hand_instance


def run(*args):
    return main([str(a) for a in args])


def test_generate_round_trips_and_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    assert run("generate", "--customers", 5, "--seed", 7, "--out", a) == 0
    assert run("generate", "--customers", 5, "--seed", 7, "--out", b) == 0
    assert a.read_bytes() == b.read_bytes()
    inst = load_instance(a)
    assert inst.n == 5
    assert str(a) in capsys.readouterr().out


def test_generate_rejects_zero_customers(tmp_path, capsys):
    assert run("generate", "--customers", 0, "--out", tmp_path / "x") == 2


def test_solve_sa_output_passes_evaluate(tmp_path, capsys):
    inst_path = tmp_path / "inst.txt"
    sol_path = tmp_path / "plan.sol"
    assert run("generate", "--customers", 5, "--seed", 3, "--out", inst_path) == 0
    assert run("solve", "--instance", inst_path, "--method", "sa",
               "--seed", 1, "--out", sol_path,
               "--trace", tmp_path / "trace.csv") == 0
    assert run("evaluate", "--instance", inst_path, "--solution", sol_path) == 0
    out = capsys.readouterr().out
    assert "feasible" in out
    # the solver's reported objective matches an independent evaluation
    inst = load_instance(inst_path)
    text, meta = read_solution(sol_path)
    total = evaluate(inst, decode(text, inst)).total
    assert abs(total - float(meta["objective"])) <= 1e-9 * abs(total)
    assert (tmp_path / "trace.csv").exists()


def test_solve_sa_is_deterministic(tmp_path):
    inst_path = tmp_path / "inst.txt"
    assert run("generate", "--customers", 6, "--seed", 9, "--out", inst_path) == 0
    a, b = tmp_path / "a.sol", tmp_path / "b.sol"
    assert run("solve", "--instance", inst_path, "--seed", 4, "--out", a) == 0
    assert run("solve", "--instance", inst_path, "--seed", 4, "--out", b) == 0
    assert a.read_bytes() == b.read_bytes()


def test_solve_exact_records_proven_status(tmp_path):
    inst_path = tmp_path / "inst.txt"
    sol_path = tmp_path / "plan.sol"
    assert run("generate", "--customers", 4, "--seed", 11, "--out", inst_path) == 0
    assert run("solve", "--instance", inst_path, "--method", "exact",
               "--out", sol_path) == 0
    _, meta = read_solution(sol_path)
    assert meta["status"] == "proven"


def test_solve_exact_budget_cut_is_unproven(tmp_path):
    inst_path = tmp_path / "inst.txt"
    sol_path = tmp_path / "plan.sol"
    assert run("generate", "--customers", 16, "--seed", 2, "--out", inst_path) == 0
    assert run("solve", "--instance", inst_path, "--method", "exact",
               "--max-seconds", 0.05, "--out", sol_path) == 0
    _, meta = read_solution(sol_path)
    assert meta["status"] == "unproven"


def test_evaluate_hand_instance_prints_74_5(tmp_path, capsys):
    inst_path = tmp_path / "inst.txt"
    sol_path = tmp_path / "plan.sol"
    write_instance(hand_instance(), inst_path)
    sol_path.write_text("0,1-1,1-2,1\n")
    assert run("evaluate", "--instance", inst_path, "--solution", sol_path) == 0
    assert "total=74.5" in capsys.readouterr().out


def test_evaluate_flags_duplicate_customer(tmp_path, capsys):
    inst_path = tmp_path / "inst.txt"
    sol_path = tmp_path / "plan.sol"
    assert run("generate", "--customers", 3, "--seed", 5, "--out", inst_path) == 0
    sol_path.write_text("0,1-1,1-2,1-4,1-0,1-1,1-3,1-4,1\n")
    assert run("evaluate", "--instance", inst_path, "--solution", sol_path) == 1
    assert "assignment" in capsys.readouterr().out


def test_evaluate_reports_structural_breakage(tmp_path, capsys):
    inst_path = tmp_path / "inst.txt"
    sol_path = tmp_path / "plan.sol"
    assert run("generate", "--customers", 3, "--seed", 5, "--out", inst_path) == 0
    sol_path.write_text("0,1-1,1-1,1-2,1-3,1-4,1\n")     # self-loop on 1
    assert run("evaluate", "--instance", inst_path, "--solution", sol_path) == 1
    assert "structure" in capsys.readouterr().out


def test_evaluate_parse_error_exits_3(tmp_path, capsys):
    inst_path = tmp_path / "inst.txt"
    sol_path = tmp_path / "plan.sol"
    assert run("generate", "--customers", 3, "--seed", 5, "--out", inst_path) == 0
    sol_path.write_text("0,1-bogus-4,1\n")
    assert run("evaluate", "--instance", inst_path, "--solution", sol_path) == 3


def test_missing_instance_exits_3(tmp_path, capsys):
    assert run("solve", "--instance", tmp_path / "nope.txt") == 3


def test_export_writes_lp_file(tmp_path):
    inst_path = tmp_path / "inst.txt"
    lp_path = tmp_path / "model.lp"
    assert run("generate", "--customers", 2, "--seed", 1, "--out", inst_path) == 0
    assert run("export", "--instance", inst_path, "--out", lp_path) == 0
    text = lp_path.read_text()
    assert text.startswith("\\")
    assert "Minimize" in text and text.rstrip().endswith("End")


def test_compare_writes_csv_and_plots(tmp_path, capsys):
    out_dir = tmp_path / "cmp"
    assert run("compare", "--sizes", "3,4", "--trials", 1, "--seed", 6,
               "--budget-exact", 60, "--out-dir", out_dir) == 0
    csv_path = out_dir / "compare.csv"
    lines = csv_path.read_text().strip().splitlines()
    assert lines[0].startswith("instance,n,exact_objective")
    assert len(lines) == 3
    for line in lines[1:]:
        cells = line.split(",")
        assert cells[4] == "True"            # proven
        assert float(cells[7]) >= -1e-9      # gap
    svgs = list(out_dir.glob("convergence_*.svg"))
    assert len(svgs) == 2


def test_seed_env_fallback(tmp_path, monkeypatch):
    monkeypatch.setenv("GREENROUTE_SEED", "21")
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    assert run("generate", "--customers", 4, "--out", a) == 0
    assert run("generate", "--customers", 4, "--seed", 21, "--out", b) == 0
    assert a.read_bytes() == b.read_bytes()

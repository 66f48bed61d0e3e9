import csv

import pytest

from fde import cli
from fde.harness import ComparisonReport, CellVerdict, ConvergenceStudy, StudyRow
from fde.quadrature import Level


def test_solve_ok(capsys):
    assert cli.main(["solve", "--problem", "ex4_1", "--method", "p4", "--n", "8", "--tol", "1e-16"]) == 0
    out, err = capsys.readouterr()
    assert "| 8 | 16 | 3.5273e-06 |" in out
    assert "contraction: q = 0.4075" in err


def test_solve_csv_and_dump(tmp_path, capsys):
    path = tmp_path / "sol.csv"
    code = cli.main(
        ["solve", "--problem", "ex5_1", "--method", "p6", "--n", "8", "--out", "csv", "--dump-solution", str(path)]
    )
    assert code == 0
    assert capsys.readouterr().out.startswith("n,K,E,order\n8,")
    rows = list(csv.DictReader(path.open()))
    assert len(rows) == 9 and set(rows[0]) == {"t", "U", "exact", "error"}
    assert float(rows[-1]["t"]) == 1.0
    assert max(float(r["error"]) for r in rows) < 1e-8


def test_solve_problem_file(tmp_path, capsys):
    path = tmp_path / "zero.fde"
    path.write_text("order = 3\ninterval = 1\nrhs = 0*u\nphi = t\nbc_family = third_a\nbc = 0, 0, 0\n")
    assert cli.main(["solve", "--problem", str(path), "--method", "p4", "--n", "8"]) == 0
    assert "| 8 | 1 |  |  |" in capsys.readouterr().out


def test_converge(capsys):
    assert cli.main(["converge", "--problem", "ex4_3", "--method", "p4", "--ladder", "8,16,32"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 5
    assert lines[-1].startswith("| 32 |")


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["solve", "--problem", "ex4_1", "--method", "p5", "--n", "8"],
        ["solve", "--problem", "nowhere", "--method", "p4", "--n", "8"],
        ["solve", "--problem", "ex4_1", "--method", "p4", "--n", "2"],
        ["solve", "--problem", "ex4_1", "--method", "p4", "--n", "8", "--tol", "1e-20"],
        ["converge", "--problem", "ex4_1", "--method", "p4", "--ladder", "16,8"],
        ["converge", "--problem", "ex4_1", "--method", "p4", "--ladder", "a,b"],
        ["verify", "--table", "Tab99"],
        ["validate-kernel", "--order", "4", "--family", "third_a"],
    ],
)
def test_usage_errors(argv, capsys):
    assert cli.main(argv) == 2


def test_version(capsys):
    assert cli.main(["--version"]) == 0
    assert "0.1.0" in capsys.readouterr().out


def test_solver_failure_exit_code(capsys):
    assert cli.main(["solve", "--problem", "ex4_1", "--method", "p4", "--n", "8", "--max-iter", "1"]) == 3
    assert "no convergence" in capsys.readouterr().err
    assert cli.main(["converge", "--problem", "ex4_1", "--method", "p4", "--ladder", "8,16", "--max-iter", "1"]) == 3


def test_validate_kernel(capsys):
    assert cli.main(["validate-kernel", "--order", "3", "--family", "third_b"]) == 0
    assert "passed: True" in capsys.readouterr().out


def _stub_verify(passed, ok=True):
    def fake(table_id, policy=None, **kwargs):
        row = StudyRow(8, 1, 1e-6) if ok else StudyRow(8, failure="NoConvergence: x")
        study = ConvergenceStudy("ex4_1", Level.P2, [row])
        return study, ComparisonReport(table_id, [CellVerdict(8, "E", 1e-6, 1e-6, passed)])

    return fake


def test_verify_exit_codes(monkeypatch, capsys):
    monkeypatch.setattr(cli, "verify_table", _stub_verify(True))
    assert cli.main(["verify", "--table", "Tab1"]) == 0
    monkeypatch.setattr(cli, "verify_table", _stub_verify(False))
    assert cli.main(["verify", "--table", "Tab1"]) == 1
    monkeypatch.setattr(cli, "verify_table", _stub_verify(False, ok=False))
    assert cli.main(["verify", "--table", "Tab1"]) == 3


def test_verify_real_table(capsys):
    assert cli.main(["verify", "--table", "Tab12", "--strict"]) == 0
    out = capsys.readouterr().out
    assert "Tab12: PASS" in out

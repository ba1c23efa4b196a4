import csv
import io
import json
from pathlib import Path

import pytest

from nsark import cli

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# trees ------------------------------------------------------------------------------

@pytest.mark.parametrize("q, N, count", [(1, 1, 1), (2, 2, 6), (3, 1, 4), (3, 2, 20), (1, 3, 3)])
def test_trees_counts(capsys, q, N, count):
    # (3, 2) is 2 + 4 + 14: the order-3 level holds N^2 (N + 1) / 2 bushy trees
    # plus N^3 tall ones, not 2 N^3
    code, out, _ = run(capsys, "trees", "--order", str(q), "-N", str(N), "--format", "json")
    assert code == 0 and len(json.loads(out)) == count


def test_trees_json_fields(capsys):
    _, out, _ = run(capsys, "trees", "--order", "3", "-N", "1", "--format", "json")
    rows = json.loads(out)
    assert set(rows[0]) >= {"order", "root_color", "children", "sigma", "gamma"}
    bushy = next(r for r in rows if r["order"] == 3 and len(r["children"]) == 2)
    assert bushy["sigma"] == 2 and bushy["gamma"] == 3


def test_trees_csv_and_table(capsys):
    _, out, _ = run(capsys, "trees", "--order", "2", "-N", "2", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 6 and rows[0].keys() == {"encoding", "order", "root_color", "sigma", "gamma"}
    _, out, _ = run(capsys, "trees", "--order", "2", "-N", "2")
    assert out.splitlines()[-1].startswith("6 trees")


def test_trees_limit_is_an_error(capsys):
    code, _, err = run(capsys, "trees", "--order", "9", "-N", "3")
    assert code == 2 and "error" in err


# converge ------------------------------------------------------------------------------

@pytest.mark.parametrize("scheme, order", [("rk4", 4.0), ("euler", 1.0), ("mprk22", 2.0)])
def test_converge_csv(capsys, scheme, order):
    code, out, _ = run(capsys, "converge", "--scheme", scheme, "--format", "csv")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "h,error" and len(lines) == 10
    assert lines[-1].startswith("# fitted order:")
    assert float(lines[-1].split(":")[1]) == pytest.approx(order, abs=0.1)


def test_converge_json_is_deterministic(capsys):
    args = ("converge", "--scheme", "geco2", "--problem", "nonlinear3", "--points", "6", "--format", "json")
    a, b = run(capsys, *args)[1], run(capsys, *args)[1]
    assert a == b
    assert json.loads(a)["problem"] == "nonlinear3"


def test_converge_jobs_do_not_change_output(capsys):
    base = ("converge", "--scheme", "mprk22", "--format", "csv")
    assert run(capsys, *base)[1] == run(capsys, *base, "--jobs", "4")[1]


# check ------------------------------------------------------------------------------

@pytest.mark.parametrize("scheme, expected", [("rk4", 0), ("mprk22-first-order", 1), ("geco3", 0),
                                              ("mprk22", 0), ("geco2-final", 1)])
def test_check_exit_codes(capsys, scheme, expected):
    code, out, _ = run(capsys, "check", "--scheme", scheme, "--problem", "nonlinear3")
    assert code == expected
    assert ("PASS" if expected == 0 else "FAIL") in out.splitlines()[0]


def test_check_rk4_residuals_zero(capsys):
    _, out, _ = run(capsys, "check", "--scheme", "rk4", "-N", "2", "--format", "json")
    rep = json.loads(out)
    assert rep["passed"] and all(max(s["residuals"]) < 1e-14 for s in rep["series"])
    assert len(rep["series"]) == 2 + 4 + 14 + 2 * 14 + 2 * 4 * 3


def test_check_method_override(capsys):
    _, out, _ = run(capsys, "check", "--scheme", "mprk43", "--problem", "nonlinear3", "--method", "mprk",
                    "--format", "json")
    assert json.loads(out)["kind"] == "mprk"


def test_check_json_byte_identical(capsys):
    args = ("check", "--scheme", "mprk43", "--problem", "nonlinear3", "--format", "json", "--seed", "3")
    assert run(capsys, *args)[1] == run(capsys, *args, "--jobs", "3")[1]


# configs and errors ------------------------------------------------------------------

def test_config_file_and_flag_override(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"scheme": "euler", "grid": {"points": 5}, "format": "csv"}))
    _, out, _ = run(capsys, "converge", "--config", str(cfg))
    assert len(out.splitlines()) == 7
    _, out, _ = run(capsys, "converge", "--config", str(cfg), "--points", "6", "--format", "json")
    assert len(json.loads(out)["h"]) == 6


@pytest.mark.parametrize("name", sorted(p.name for p in CONFIGS.glob("*.json")))
def test_shipped_configs_run(capsys, name):
    command = "check" if "check" in name else "converge"
    code, out, _ = run(capsys, command, "--config", str(CONFIGS / name))
    assert code == 0 and out


def test_output_file(capsys, tmp_path):
    path = tmp_path / "trees.json"
    code, out, _ = run(capsys, "trees", "--order", "2", "--format", "json", "--output", str(path))
    assert code == 0 and out == ""
    assert len(json.loads(path.read_text())) == 2


@pytest.mark.parametrize("argv", [
    ["converge", "--scheme", "nope"],
    ["converge", "--problem", "brusselator"],
    ["converge", "--h0", "-1"],
    ["converge", "--ratio", "2"],
    ["check", "--config", "/nonexistent/config.json"],
    ["check", "--scheme", "rk4", "--points", "3"],
])
def test_errors_exit_two(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2 and out == "" and err.startswith(f"nsark {argv[0]}: error")


def test_json_scheme_needs_order(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"scheme": {"kind": "rk", "tableau": "heun"}}))
    code, _, err = run(capsys, "check", "--config", str(cfg))
    assert code == 2 and "--order" in err


def test_schemes_listing(capsys):
    code, out, _ = run(capsys, "schemes")
    assert code == 0 and "mprk43" in out and "order 3" in out

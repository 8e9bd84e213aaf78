import csv
import filecmp

import pytest

from sobench.cli import ConfigError, ExperimentConfig, load_config, main
from sobench.output import CURVE_COLUMNS, TRAJECTORY_COLUMNS


def run(tmp_path, *extra, out="out"):
    args = ["run", "--problems", "eoq", "--algorithms", "rs,nm", "--macroreps", "2",
            "--budget", "600", "--seed", "7", "--out", str(tmp_path / out), *extra]
    return main(args)


def read(path):
    with open(path) as fh:
        header = fh.readline()
        return header, list(csv.reader(fh))


def tree_equal(a, b):
    cmp = filecmp.dircmp(a, b)
    if cmp.left_only or cmp.right_only or cmp.diff_files or cmp.funny_files:
        return False
    return all(tree_equal(a / d, b / d) for d in cmp.common_dirs)


def test_list(capsys):
    assert main(["list"]) == 0
    out = capsys.readouterr().out
    assert "rosenbrock d=40 known-optimum" in out
    assert "san d=13 unknown-optimum" in out
    assert "pomdp" not in out


def test_run_is_byte_identical(tmp_path):
    assert run(tmp_path, out="a") == 0
    assert run(tmp_path, "--jobs", "2", out="b") == 0
    assert tree_equal(tmp_path / "a", tmp_path / "b")


def test_run_layout_and_schemas(tmp_path):
    assert run(tmp_path) == 0
    root = tmp_path / "out" / "experiment"
    header, rows = read(root / "trajectories" / "eoq__rs.csv")
    assert "experiment_id=experiment" in header and "seed=7" in header
    assert rows[0] == TRAJECTORY_COLUMNS
    grids = []
    for alg in ("rs", "nm"):
        header, rows = read(root / "curves" / f"eoq__{alg}.csv")
        assert "seed=7" in header
        assert rows[0] == CURVE_COLUMNS
        grids.append([r[2] for r in rows[1:]])
    assert grids[0] == grids[1]
    assert (root / "curves" / "eoq__ecdf.csv").exists()
    meta = (root / "meta.txt").read_text()
    for key in ("budget_unit=replications", "testbed=reconstructed", "r_post=30",
                "z_before_first_record=defined-from-first-evaluation"):
        assert key in meta


def test_bad_start_flag(tmp_path):
    assert run(tmp_path, "--bad-start") == 0
    _, rows = read(tmp_path / "out" / "experiment" / "trajectories" / "eoq__nm.csv")
    first = [r for r in rows[1:] if r[3] == "0"][0]
    assert first[5] == "10.0"


def test_unknown_algorithm(tmp_path, capsys):
    assert main(["run", "--algorithms", "cmaes", "--out", str(tmp_path)]) == 1
    err = capsys.readouterr().err
    assert "algorithms" in err and "strong1" in err


def test_spsa_sweep_cost_in_metadata(tmp_path):
    assert main(["run", "--problems", "eoq", "--algorithms", "spsa", "--macroreps", "1",
                 "--budget", "300", "--out", str(tmp_path)]) == 0
    meta = (tmp_path / "experiment" / "meta.txt").read_text()
    assert "spsa_sweep_cost.eoq=" in meta


def test_report_rejects_curve_input(tmp_path, capsys):
    assert run(tmp_path) == 0
    curves = tmp_path / "out" / "experiment" / "curves"
    assert main(["report", str(curves / "eoq__rs.csv")]) == 1
    assert "cannot be re-reported" in capsys.readouterr().err


def test_report_rejects_mixed_problems(tmp_path, capsys):
    assert run(tmp_path, out="a") == 0
    assert main(["run", "--problems", "ctsnews", "--algorithms", "rs", "--macroreps", "2",
                 "--budget", "600", "--seed", "7", "--out", str(tmp_path / "b")]) == 0
    a = tmp_path / "a" / "experiment" / "trajectories" / "eoq__rs.csv"
    b = tmp_path / "b" / "experiment" / "trajectories" / "ctsnews__rs.csv"
    assert main(["report", str(a), str(b), "--out", str(tmp_path / "c")]) == 1
    assert "mix problems" in capsys.readouterr().err


def test_report_reproduces_run_curves(tmp_path):
    assert run(tmp_path) == 0
    root = tmp_path / "out" / "experiment"
    assert main(["report", str(root / "trajectories"), "--out", str(tmp_path / "again")]) == 0
    assert tree_equal(root / "curves", tmp_path / "again")


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("# demo\nexperiment_id=demo\nproblems=eoq\nalgorithms=rs\nmacroreps=3\n"
                   "seed=4\nbudget=300\nspsa.alpha=0.7\n")
    config = load_config(cfg)
    assert (config.experiment_id, config.macroreps, config.params) == ("demo", 3, {"spsa": {"alpha": 0.7}})
    assert main(["run", "--config", str(cfg), "--macroreps", "1", "--out", str(tmp_path / "o")]) == 0
    meta = (tmp_path / "o" / "demo" / "meta.txt").read_text()
    assert "macroreps=1" in meta
    assert "param.spsa.alpha=0.7" in meta


@pytest.mark.parametrize(
    "text, field",
    [
        ("macroreps=0\n", "macroreps"),
        ("problems=pomdp\n", "problems"),
        ("gs.bogus=1\n", "gs.bogus"),
        ("colour=red\n", "colour"),
        ("seed=abc\n", "seed"),
    ],
)
def test_config_errors_name_field(tmp_path, text, field):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text(text)
    with pytest.raises(ConfigError) as err:
        load_config(cfg).validate()
    assert err.value.field == field


def test_bad_start_requires_problem_support():
    with pytest.raises(ConfigError) as err:
        ExperimentConfig(problems=["san"], bad_start=True).validate()
    assert err.value.field == "bad_start"

import csv
import json
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from ncs.cli import (
    ConfigTypeError,
    MissingConfigKey,
    UnknownConfigKey,
    main,
    parse_config,
    read_trajectory_csv,
    run_experiment,
)
from ncs.engine import NcsConfig, RunRecord, ncs_run
from ncs.objectives import make_problem
from ncs.plotting import TrajectoryError, emit_trajectory_svg

SVG = "{http://www.w3.org/2000/svg}"


def write_cfg(path, **kv):
    path.write_text("".join(f"{k} = {v}\n" for k, v in kv.items()))
    return path


def test_flags_override_file(tmp_path):
    cfg_file = write_cfg(tmp_path / "c.txt", algorithm="ncs", problem="sphere", budget=100, n=5, seed=3)
    cfg = parse_config(cfg_file, {"n": "4"})
    assert cfg.n == 4 and cfg.seed == 3 and cfg.budget == 100
    assert cfg.t_max == 24


def test_unknown_key_is_named(tmp_path):
    cfg_file = write_cfg(tmp_path / "c.txt", algorithm="ncs", problem="sphere", budget=100, sgima0=1)
    with pytest.raises(UnknownConfigKey, match="sgima0"):
        parse_config(cfg_file)


def test_missing_and_bad_types():
    with pytest.raises(MissingConfigKey, match="budget"):
        parse_config(overrides={"algorithm": "ncs", "problem": "sphere"})
    with pytest.raises(ConfigTypeError, match="budget"):
        parse_config(overrides={"algorithm": "ncs", "problem": "sphere", "budget": "ten"})
    with pytest.raises(ConfigTypeError, match="problem"):
        parse_config(overrides={"algorithm": "ncs", "problem": "spehre", "budget": "10"})


def test_defaults_and_env_output_dir(monkeypatch, tmp_path):
    monkeypatch.setenv("NCS_OUTPUT_DIR", str(tmp_path / "env"))
    cfg = parse_config(overrides={"algorithm": "phc", "problem": "ackley", "budget": "50"})
    assert (cfg.dim, cfg.n, cfg.r, cfg.epoch, cfg.runs, cfg.bound_policy) == (30, 10, 0.99, 10, 25, "reflect")
    assert cfg.output_dir == str(tmp_path / "env")


def test_comments_and_bools(tmp_path):
    f = tmp_path / "c.txt"
    f.write_text("# experiment\nalgorithm = ncs  # inline\nproblem=sphere\nbudget= 40\ntrajectory = yes\n")
    cfg = parse_config(f)
    assert cfg.trajectory is True and cfg.budget == 40


@pytest.mark.parametrize("algorithm", ["ncs", "phc", "random"])
def test_results_byte_identical(tmp_path, algorithm):
    args = ["bench", "--algorithm", algorithm, "--problem", "rastrigin", "--dim", "3",
            "--budget", "600", "--runs", "3", "--seed", "5", "--trajectory"]
    assert main(args + ["-o", str(tmp_path / "a")]) == 0
    assert main(args + ["-o", str(tmp_path / "b")]) == 0
    for name in ["results.csv", "summary.json"]:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    if algorithm != "random":
        assert (tmp_path / "a" / "trajectory_run2.csv").read_bytes() == (tmp_path / "b" / "trajectory_run2.csv").read_bytes()


def test_results_csv_and_summary_agree(tmp_path):
    cfg = parse_config(overrides={"algorithm": "ncs", "problem": "griewank", "dim": "4", "budget": "500",
                                  "runs": "4", "output_dir": str(tmp_path)})
    res = run_experiment(cfg)
    with open(tmp_path / "results.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert list(rows[0]) == ["run", "seed", "final_error", "evaluations"]
    errs = np.array([float(r["final_error"]) for r in rows])
    assert errs.tolist() == res.errors
    assert all(int(r["evaluations"]) == 500 for r in rows)
    s = json.loads((tmp_path / "summary.json").read_text())
    assert abs(s["mean_error"] - errs.mean()) <= 1e-12
    assert abs(s["std_error"] - errs.std(ddof=0)) <= 1e-12


def test_trajectory_csv_round_trip(tmp_path):
    cfg = parse_config(overrides={"algorithm": "ncs", "problem": "sphere", "dim": "2", "budget": "40", "n": "4",
                                  "runs": "1", "trajectory": "true", "output_dir": str(tmp_path)})
    rec = run_experiment(cfg).records[0]
    back = read_trajectory_csv(tmp_path / "trajectory_run0.csv")
    assert len(back) == len(rec.trajectory) == 4 * 10
    for (i1, r1, x1, f1), (i2, r2, x2, f2) in zip(rec.trajectory, back):
        assert (i1, r1, f1) == (i2, r2, f2) and np.array_equal(x1, x2)


def test_svg_structure(tmp_path):
    p = make_problem("rastrigin", 2, bounds=(-5, 5))
    rec = ncs_run(p, NcsConfig(t_max=50, n=4, seed=0, record_trajectory=True))
    path = emit_trajectory_svg(rec, p, tmp_path / "t.svg")
    root = ET.parse(path).getroot()
    assert len(root.findall(f".//{SVG}polyline[@class='trajectory']")) == 4
    assert len(root.findall(f".//{SVG}polygon[@class='start']")) == 4
    assert len(root.findall(f".//{SVG}rect[@class='end']")) == 4
    assert root.findall(f".//{SVG}path[@class='contour']")


def test_svg_errors(tmp_path):
    p2 = make_problem("sphere", 2)
    with pytest.raises(TrajectoryError, match="trajectory"):
        emit_trajectory_svg(RunRecord(np.zeros(2), 0.0, [], 0, trajectory=[]), p2, tmp_path / "x.svg")
    rec3 = ncs_run(make_problem("sphere", 3), NcsConfig(t_max=2, n=2, record_trajectory=True))
    with pytest.raises(TrajectoryError, match="2-D"):
        emit_trajectory_svg(rec3, make_problem("sphere", 3), tmp_path / "x.svg")


def test_run_with_svg_and_traj_plot(tmp_path):
    out = tmp_path / "o"
    assert main(["run", "--algorithm", "ncs", "--problem", "ackley", "--dim", "2", "--budget", "200",
                 "--n", "4", "--trajectory", "--svg", "-o", str(out)]) == 0
    ET.parse(out / "trajectory_run0.svg")
    assert main(["traj-plot", str(out / "trajectory_run0.csv"), "--problem", "ackley",
                 "-o", str(tmp_path / "p.svg")]) == 0
    root = ET.parse(tmp_path / "p.svg").getroot()
    assert len(root.findall(f".//{SVG}polyline[@class='trajectory']")) == 4


def test_cli_reports_config_errors(tmp_path, capsys):
    cfg_file = write_cfg(tmp_path / "c.txt", algorithm="ncs", problem="sphere", budget=100, sgima0=1)
    assert main(["run", "--config", str(cfg_file), "-o", str(tmp_path)]) == 2
    assert "sgima0" in capsys.readouterr().err


def test_stats_subcommand(tmp_path, capsys):
    common = ["--problem", "sphere", "--dim", "5", "--budget", "1000", "--runs", "6"]
    assert main(["bench", "--algorithm", "ncs", *common, "-o", str(tmp_path / "ncs")]) == 0
    assert main(["bench", "--algorithm", "random", *common, "-o", str(tmp_path / "rnd")]) == 0
    assert main(["stats", str(tmp_path / "ncs"), str(tmp_path / "rnd"), "--out", str(tmp_path / "rep")]) == 0
    text = capsys.readouterr().out
    assert "ncs" in text and "random" in text
    with open(tmp_path / "rep" / "report.csv", newline="") as fh:
        rows = {r["algorithm"]: r for r in csv.DictReader(fh)}
    assert rows["ncs"]["wins"] == "1" and rows["random"]["losses"] == "1"
    assert (tmp_path / "rep" / "ranks.csv").read_text().startswith("algorithm,avg_rank,top_1,top_2")


def test_antenna_export(tmp_path):
    out = tmp_path / "ant"
    assert main(["antenna", "--elements", "9", "--budget", "300", "--runs", "2", "--angle-step", "0.5",
                 "-o", str(out)]) == 0
    layout = np.loadtxt(out / "layout.txt")
    assert layout.shape == (9, 2)
    assert np.allclose(layout[:, 0], -layout[::-1, 0])
    pattern = np.loadtxt(out / "pattern.txt")
    assert pattern.shape == (361, 2)
    assert pattern[:, 1].max() == pytest.approx(0.0, abs=1e-6)
    s = json.loads((out / "summary.json").read_text())
    assert s["unit"] == "dB" and s["mean_error"] < 0

import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from slegmc.cli import main, parse_grid


def run_cli(args, out_dir):
    return main(args + ["--out-dir", str(out_dir)])


def test_parse_grid_log_default():
    g = parse_grid("0.1:0.4:6")
    assert len(g) == 6
    assert np.allclose(g, np.geomspace(0.1, 0.4, 6))


def test_parse_grid_linear():
    g = parse_grid("1:2:3:lin")
    assert np.allclose(g, [1.0, 1.5, 2.0])


def test_parse_grid_malformed_exit_2(tmp_path):
    rc = run_cli(["cone-prob", "--delta-grid", "oops", "--samples", "100"], tmp_path)
    assert rc == 2


def test_unknown_config_key_exit_2(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("[run]\nbogus_key = 3\n")
    rc = run_cli(["hitting-laplace", "--config", str(cfg), "--samples", "100"], tmp_path)
    assert rc == 2


def test_missing_config_file_exit_2(tmp_path):
    rc = run_cli(["hitting-laplace", "--config", str(tmp_path / "none.cfg")], tmp_path)
    assert rc == 2


def test_config_file_flags_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("[run]\nsamples = 500\nseed = 3\ndelta = 0.3\nlambda = 2\n")
    rc = run_cli(
        ["hitting-laplace", "--config", str(cfg), "--samples", "800"], tmp_path
    )
    report = json.loads((tmp_path / "hitting-laplace.json").read_text())
    assert report["config"]["samples"] == 800.0  # flag wins
    assert report["config"]["seed"] == 3
    assert rc in (0, 1)


def test_hitting_laplace_outputs_and_verdicts(tmp_path):
    rc = run_cli(
        [
            "hitting-laplace", "--a", "1", "--gamma", "1", "--lambda", "2",
            "--delta", "0.3", "--samples", "20000", "--seed", "5",
        ],
        tmp_path,
    )
    assert rc == 0
    csv_text = (tmp_path / "hitting-laplace.csv").read_text()
    assert csv_text.splitlines()[0].startswith("a,gamma,lambda,delta,estimate")
    report = json.loads((tmp_path / "hitting-laplace.json").read_text())
    assert report["verdicts"][0]["passed"] is True
    # theory value 0.3^2 = 0.09 embedded
    assert abs(report["verdicts"][0]["target"] - 0.09) < 1e-12


def test_byte_identical_reruns(tmp_path):
    args = [
        "hitting-laplace", "--lambda", "2", "--delta", "0.3",
        "--samples", "5000", "--seed", "9",
    ]
    d1, d2 = tmp_path / "one", tmp_path / "two"
    run_cli(args, d1)
    run_cli(args, d2)
    assert (d1 / "hitting-laplace.csv").read_bytes() == (d2 / "hitting-laplace.csv").read_bytes()
    assert (d1 / "hitting-laplace.json").read_bytes() == (d2 / "hitting-laplace.json").read_bytes()


def test_checkpoint_resume_identical(tmp_path):
    args = [
        "hitting-laplace", "--lambda", "2", "--delta", "0.3",
        "--samples", "5000", "--seed", "9",
    ]
    run_cli(args, tmp_path)
    first = (tmp_path / "hitting-laplace.json").read_bytes()
    assert (tmp_path / "hitting-laplace.ckpt.json").exists()
    run_cli(args, tmp_path)  # resumes from the checkpoint
    assert (tmp_path / "hitting-laplace.json").read_bytes() == first


def test_csv_roundtrip_full_precision(tmp_path):
    run_cli(
        ["hitting-laplace", "--lambda", "2", "--delta", "0.3", "--samples", "5000"],
        tmp_path,
    )
    lines = (tmp_path / "hitting-laplace.csv").read_text().splitlines()
    header = lines[0].split(",")
    row = lines[1].split(",")
    est = float(row[header.index("estimate")])
    assert repr(est) == row[header.index("estimate")]


def test_martingale_check_subcommand(tmp_path):
    rc = run_cli(
        ["martingale-check", "--kappa", "16", "--t", "0.2", "--samples", "20000", "--seed", "2"],
        tmp_path,
    )
    assert rc == 0
    report = json.loads((tmp_path / "martingale-check.json").read_text())
    assert abs(report["verdicts"][0]["target"] - 0.353553) < 1e-5


def test_verify_main_theory_rows(tmp_path):
    rc = run_cli(
        [
            "verify-main", "--kappa-list", "16", "--seed", "7",
            "--samples", "150000", "--delta-grid", "0.1:0.4:6",
        ],
        tmp_path,
    )
    lines = (tmp_path / "verify-main.csv").read_text().splitlines()
    header = lines[0].split(",")
    row = lines[1].split(",")
    assert float(row[header.index("sigma_theory")]) == 4.0
    assert abs(float(row[header.index("c")]) + 0.7071067811865476) < 1e-12
    report = json.loads((tmp_path / "verify-main.json").read_text())
    names = [v["name"] for v in report["verdicts"]]
    assert any("identity" in n for n in names)
    assert rc in (0, 1)


def test_console_script_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "slegmc.cli", "hitting-laplace", "--lambda", "2",
         "--delta", "0.3", "--samples", "2000", "--out-dir", str(tmp_path)],
        capture_output=True, text=True,
    )
    assert proc.returncode in (0, 1)
    assert "report:" in proc.stdout

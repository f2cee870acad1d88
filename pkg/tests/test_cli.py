import json
import subprocess
import sys
from pathlib import Path

import pytest

from prs_lab.cli import DEFAULTS, load_config, main, run
from prs_lab.errors import UsageError


def strip_timing(report: dict) -> dict:
    out = dict(report)
    out.pop("elapsed_s")
    return out


def test_reports_are_deterministic_modulo_timing():
    cfg = dict(DEFAULTS["smallrange-stats"])
    cfg["tables"] = 500
    a = run("smallrange-stats", cfg, seed=9)
    b = run("smallrange-stats", cfg, seed=9)
    assert strip_timing(a) == strip_timing(b)


def test_unknown_config_field_is_a_usage_error(tmp_path):
    bad = tmp_path / "cfg.json"
    bad.write_text(json.dumps({"mystery_knob": 3}))
    with pytest.raises(UsageError, match="hybrids-check.mystery_knob"):
        load_config("hybrids-check", str(bad), "desk")


def test_config_file_overrides_defaults(tmp_path):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({"tables": 123}))
    cfg = load_config("smallrange-stats", str(cfg_path), "desk")
    assert cfg["tables"] == 123
    assert cfg["r"] == DEFAULTS["smallrange-stats"]["r"]


def test_main_smallrange_pass(tmp_path, capsys):
    code = main(
        ["smallrange-stats", "--seed", "3", "--trials", "2000", "--out", str(tmp_path)]
    )
    out = capsys.readouterr().out
    assert code == 0
    assert "PASS single-point-marginal" in out
    report = json.loads((tmp_path / "smallrange-stats_seed3.json").read_text())
    assert report["all_pass"] is True
    assert report["config"]["tables"] == 2000


def test_main_usage_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "cfg.json"
    bad.write_text(json.dumps({"nope": 1}))
    code = main(["hybrids-check", "--config", str(bad), "--out", str(tmp_path)])
    assert code == 2
    assert "usage error" in capsys.readouterr().err


def test_failing_bound_yields_nonzero_exit(tmp_path, capsys):
    # One copy per probe cannot separate the ensembles: the projection
    # spans the whole base space and the advantage flag must fail.
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"lam": 6, "n": 2, "t": 1, "trials": 100}))
    code = main(
        ["attack-run", "--config", str(cfg), "--seed", "2", "--out", str(tmp_path)]
    )
    assert code == 1
    out = capsys.readouterr().out
    assert "FAIL gram-advantage" in out


def test_attack_run_with_svg_and_csv(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"lam": 6, "n": 3, "t": 7, "trials": 300}))
    code = main(
        [
            "attack-run",
            "--config",
            str(cfg),
            "--seed",
            "4",
            "--out",
            str(tmp_path),
            "--svg",
            "--csv",
            "--workers",
            "2",
        ]
    )
    assert code == 0
    assert (tmp_path / "attack-run_seed4.json").exists()
    assert (tmp_path / "attack-run_seed4.svg").read_text().startswith("<svg")
    assert (tmp_path / "attack-run_seed4.csv").exists()


def test_console_script_entry_point(tmp_path):
    proc = subprocess.run(
        [
            sys.executable,
            "-m",
            "prs_lab.cli",
            "smallrange-stats",
            "--seed",
            "3",
            "--trials",
            "1000",
            "--out",
            str(tmp_path),
        ],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert "report:" in proc.stdout


def test_commit_demo_report(tmp_path):
    code = main(
        ["commit-demo", "--seed", "1", "--trials", "4", "--out", str(tmp_path)]
    )
    assert code == 0
    report = json.loads((tmp_path / "commit-demo_seed1.json").read_text())
    assert report["metrics"]["accepted"] == 4
    assert report["metrics"]["extractor_agreements"] == 4
    assert len(report["metrics"]["first_transcript_digest"]) == 64

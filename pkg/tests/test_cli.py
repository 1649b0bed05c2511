import json

import pytest

from bleaq.cli import main

TINY = {"pop_size": 8, "max_generations": 5, "lower_pop_size": 12, "lower_max_generations": 30}


def test_list_problems(capsys):
    assert main(["list-problems", "--format", "json"]) == 0
    entries = json.loads(capsys.readouterr().out)
    assert [e["id"] for e in entries][:2] == ["EX1", "SMD1"]
    tp1 = next(e for e in entries if e["id"] == "TP1")
    assert tp1["known_optimum"] == {"F": 225.0, "f": 100.0} and tp1["n_upper_constraints"] == 3


def test_list_problems_markdown(capsys):
    assert main(["list-problems", "--dims", "1,2,1"]) == 0
    out = capsys.readouterr().out
    assert "| SMD6 | 2 | 5 |" in out


def test_run_aggregate_compare(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"problem": "EX1", "runs": 5, "seed": 0, "config": TINY}))
    bleaq_dir, nested_dir = tmp_path / "b", tmp_path / "n"
    # --runs on the command line wins over the config file
    assert main(["run", "--config", str(cfg), "--runs", "2", "--out", str(bleaq_dir), "--format", "csv"]) == 0
    assert len(list((bleaq_dir / "runs").glob("*.json"))) == 2
    assert (bleaq_dir / "tables" / "summary.csv").exists()
    assert main(["run", "--config", str(cfg), "--runs", "2", "--algo", "nested", "--out", str(nested_dir)]) == 0
    capsys.readouterr()
    assert main(["aggregate", "--out", str(bleaq_dir), "--format", "json"]) == 0
    rows = json.loads(capsys.readouterr().out)
    assert rows[0]["runs"] == 2 and rows[0]["algorithm"] == "bleaq"
    assert main(["compare", "--baseline", str(nested_dir), "--candidate", str(bleaq_dir)]) == 0
    assert "EX1" in capsys.readouterr().out
    assert main(["report", "--out", str(bleaq_dir)]) == 0
    assert "published_median_ul_acc" in capsys.readouterr().out


def test_report_published(capsys):
    assert main(["report", "--problem", "SMD1,TP3"]) == 0
    out = capsys.readouterr().out
    assert "0.006664" in out and "TP3" in out


def test_run_unknown_problem_fails(capsys):
    assert main(["run", "--problem", "XYZ", "--runs", "1"]) != 0
    assert "error" in capsys.readouterr().err


def test_run_requires_problem():
    assert main(["run", "--runs", "1"]) != 0


def test_bad_config_key(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"problem": "EX1", "colour": "red"}))
    assert main(["run", "--config", str(cfg)]) != 0


def test_missing_subcommand():
    with pytest.raises(SystemExit):
        main([])

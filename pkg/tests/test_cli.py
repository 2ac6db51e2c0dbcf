import json

import pytest

from ploop.cli import main


@pytest.fixture(autouse=True)
def quiet_log_level(monkeypatch):
    monkeypatch.delenv("PLOOP_LOG_LEVEL", raising=False)


def test_validate_ok(fixtures_dir, capsys):
    code = main(["validate", "--scenario", str(fixtures_dir / "closed_loop.scn")])
    assert code == 0
    assert capsys.readouterr().out.startswith("OK: closed_loop")


def test_validate_missing_file_exits_1(tmp_path, capsys):
    code = main(["validate", "--scenario", str(tmp_path / "absent.scn")])
    assert code == 1
    assert "error:" in capsys.readouterr().err


def test_validate_invalid_scenario_exits_1(tmp_path, capsys):
    path = tmp_path / "bad.scn"
    path.write_text(json.dumps({"format": 1, "name": "x", "horizon": 0}))
    assert main(["validate", "--scenario", str(path)]) == 1


def test_run_writes_outputs_and_prints_report(fixtures_dir, tmp_path, capsys):
    code = main([
        "run", "--scenario", str(fixtures_dir / "closed_loop.scn"),
        "--out", str(tmp_path),
    ])
    assert code == 0
    out = capsys.readouterr().out
    assert "closed_loop" in out
    for suffix in ("events.jsonl", "report.json", "report.txt", "repository.jsonl"):
        assert (tmp_path / f"closed_loop.{suffix}").exists()


def test_run_with_seed_override(fixtures_dir, tmp_path):
    code = main([
        "run", "--scenario", str(fixtures_dir / "minimal.scn"),
        "--seed", "123", "--out", str(tmp_path),
    ])
    assert code == 0
    raw = json.loads((tmp_path / "minimal.report.json").read_text())
    assert raw["seed"] == 123


def test_report_recomputes_from_log(fixtures_dir, tmp_path, capsys):
    main(["run", "--scenario", str(fixtures_dir / "closed_loop.scn"),
          "--out", str(tmp_path)])
    capsys.readouterr()
    code = main(["report", "--log", str(tmp_path / "closed_loop.events.jsonl"),
                 "--json"])
    assert code == 0
    raw = json.loads(capsys.readouterr().out)
    assert raw["scenario"] == "closed_loop"
    assert raw["launch_times"] == [
        {"family": "px-100@urn:mfg:acme", "generation": 2, "tick": 19}
    ]


def test_compare_paired_reports(fixtures_dir, tmp_path, capsys):
    main(["run", "--scenario", str(fixtures_dir / "closed_loop.scn"),
          "--out", str(tmp_path)])
    main(["run", "--scenario", str(fixtures_dir / "baseline.scn"),
          "--out", str(tmp_path)])
    capsys.readouterr()
    code = main([
        "compare",
        "--a", str(tmp_path / "closed_loop.report.json"),
        "--b", str(tmp_path / "baseline.report.json"),
        "--json",
    ])
    assert code == 0
    raw = json.loads(capsys.readouterr().out)
    assert raw["delta"] == 18
    assert raw["improvement"] is True


def test_compare_incomparable_exits_1(fixtures_dir, tmp_path, capsys):
    main(["run", "--scenario", str(fixtures_dir / "minimal.scn"),
          "--out", str(tmp_path)])
    main(["run", "--scenario", str(fixtures_dir / "baseline.scn"),
          "--out", str(tmp_path)])
    capsys.readouterr()
    code = main([
        "compare",
        "--a", str(tmp_path / "minimal.report.json"),
        "--b", str(tmp_path / "baseline.report.json"),
    ])
    assert code == 1


def test_bad_log_level_exits_1(fixtures_dir, monkeypatch, capsys):
    monkeypatch.setenv("PLOOP_LOG_LEVEL", "chatty")
    code = main(["validate", "--scenario", str(fixtures_dir / "minimal.scn")])
    assert code == 1
    assert "PLOOP_LOG_LEVEL" in capsys.readouterr().err


def test_log_level_values_accepted(fixtures_dir, monkeypatch):
    for level in ("error", "info", "debug"):
        monkeypatch.setenv("PLOOP_LOG_LEVEL", level)
        assert main(["validate", "--scenario", str(fixtures_dir / "minimal.scn")]) == 0

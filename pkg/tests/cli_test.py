"""Test the command-line interface end to end, through its output files."""

import json
from pathlib import Path

import pandas as pd
import pytest

from hypcount.cli import build_parser, main
from hypcount.config import OUTPUT_DIR_ENV
from hypcount.selftest import run_selftest


def read_json(path: Path) -> dict:
    return json.loads(path.read_text(encoding="utf-8"))


def test_selftest_passes(tmp_path: Path) -> None:
    results = run_selftest()
    assert results
    assert [r.name for r in results if not r.passed] == []
    assert main(["selftest", "--out", str(tmp_path)]) == 0
    assert read_json(tmp_path / "selftest.json")["passed"] is True


def test_parser_lists_every_subcommand() -> None:
    parser = build_parser()
    for command in ("exponent", "loops", "geodesics", "ortho", "ps-measure", "sweep", "selftest"):
        args = parser.parse_args([command])
        assert args.subcommand == command


def test_exponent(tmp_path: Path, fixtures_dir: Path) -> None:
    argv = ["exponent", "--group", str(fixtures_dir / "cyclic.grp"), "--T", "40"]
    assert main([*argv, "--out", str(tmp_path)]) == 0
    report = read_json(tmp_path / "exponent.json")
    assert report["elementary"] is True
    assert report["group"] == "cyclic"
    assert abs(report["delta_series"]) < 0.02
    assert report["header"]["tool"] == "hypcount"
    assert report["header"]["certificates"]["orbit"]["kind"] == "pruned"
    assert report["header"]["partial"] is False


def test_loops_files(tmp_path: Path, fixtures_dir: Path) -> None:
    argv = ["loops", "--group", str(fixtures_dir / "cyclic.grp"), "--T", "3"]
    assert main([*argv, "--out", str(tmp_path)]) == 0
    text = (tmp_path / "loops.csv").read_text(encoding="utf-8")
    assert text.startswith("# tool: hypcount")
    frame = pd.read_csv(tmp_path / "loops.csv", comment="#")
    assert frame["word"].tolist() == ["a", "A", "aa", "AA"]
    report = read_json(tmp_path / "loops.json")
    assert report["fit"] is None
    assert "note" in report


def test_geodesics_and_ortho(tmp_path: Path, fixtures_dir: Path) -> None:
    group = str(fixtures_dir / "schottky.grp")
    argv = ["geodesics", "--group", group, "--L", "3.5", "--delta", "0.5", "--out", str(tmp_path)]
    assert main(argv) == 0
    # a, b, ab, aB and abAB in both orientations
    assert read_json(tmp_path / "geodesics.json")["count"] == 10
    argv = ["ortho", "--group", group, "--T", "5", "--bodies", "ball0,ball0"]
    assert main([*argv, "--out", str(tmp_path)]) == 0
    frame = pd.read_csv(tmp_path / "ortho.csv", comment="#")
    assert (frame["length"] > 0).all()
    assert read_json(tmp_path / "ortho.json")["diagnostics"]["overlaps_skipped"] == 1


def test_ps_measure(tmp_path: Path, fixtures_dir: Path) -> None:
    argv = ["ps-measure", "--group", str(fixtures_dir / "schottky.grp"), "--T", "2.5"]
    assert main([*argv, "--delta", "0.5", "--out", str(tmp_path)]) == 0
    report = read_json(tmp_path / "ps_measure.json")
    assert report["atoms"] == 4
    assert report["header"]["certificates"]["orbit"]["slack"] == pytest.approx(2.0)
    assert len(pd.read_csv(tmp_path / "ps_measure.csv", comment="#")) == 4


def test_missing_input(tmp_path: Path, fixtures_dir: Path) -> None:
    assert main(["exponent", "--T", "5", "--out", str(tmp_path)]) == 2
    error = read_json(tmp_path / "error.json")
    assert error["error"] == "ValidationError"
    assert error["details"]["missing"] == ["--group"]
    missing = str(fixtures_dir / "nowhere.grp")
    assert main(["loops", "--group", missing, "--T", "5", "--out", str(tmp_path)]) == 2
    assert read_json(tmp_path / "error.json")["details"]["file"] == missing


def test_invalid_arguments(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv(OUTPUT_DIR_ENV, str(tmp_path))
    assert main(["loops", "--window", "1"]) == 2
    assert read_json(tmp_path / "error.json")["error"] == "ValidationError"
    assert main(["loops", "--T", "-1"]) == 2
    assert read_json(tmp_path / "error.json")["error"] == "ParameterError"


def test_unwritable_output_directory(
    tmp_path: Path, fixtures_dir: Path, capsys: pytest.CaptureFixture[str]
) -> None:
    blocker = tmp_path / "taken"
    blocker.write_text("", encoding="utf-8")
    group = str(fixtures_dir / "cyclic.grp")
    assert main(["loops", "--group", group, "--T", "3", "--out", str(blocker)]) == 2
    out = capsys.readouterr().out
    assert '"error": "ValidationError"' in out
    assert f'"output_dir": "{blocker}"' in out
    argv = ["exponent", "--group", str(fixtures_dir / "schottky.grp"), "--T", "10"]
    assert main([*argv, "--budget", "10", "--out", str(blocker / "nested")]) == 2


def test_budget_writes_partial_results(tmp_path: Path, fixtures_dir: Path) -> None:
    argv = ["exponent", "--group", str(fixtures_dir / "schottky.grp"), "--T", "10"]
    assert main([*argv, "--budget", "10", "--out", str(tmp_path)]) == 3
    partial = read_json(tmp_path / "partial.json")
    assert partial["header"]["partial"] is True
    assert partial["error"] == "BudgetExceededError"
    assert partial["stats"]["nodes_visited"] > 10


def test_outputs_do_not_depend_on_workers(tmp_path: Path, fixtures_dir: Path) -> None:
    argv = ["loops", "--group", str(fixtures_dir / "three_gen.grp"), "--T", "10"]
    assert main([*argv, "--out", str(tmp_path / "serial")]) == 0
    assert main([*argv, "--workers", "2", "--out", str(tmp_path / "parallel")]) == 0
    for name in ("loops.csv", "loops.json"):
        serial = (tmp_path / "serial" / name).read_bytes()
        assert serial == (tmp_path / "parallel" / name).read_bytes()


@pytest.mark.slow
def test_sweep(tmp_path: Path, fixtures_dir: Path) -> None:
    argv = ["sweep", "--family", str(fixtures_dir / "constant.fam"), "--out", str(tmp_path)]
    assert main(argv) == 0
    frame = pd.read_csv(tmp_path / "sweep.csv", comment="#")
    assert frame["k"].astype(str).tolist() == ["1.0", "2.0", "3.0", "limit"]
    assert (frame["gap_delta"] == 0).all()
    assert read_json(tmp_path / "sweep.json")["failed"] == []

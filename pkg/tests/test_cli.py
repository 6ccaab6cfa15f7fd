import json
import socket
from pathlib import Path

import pytest
from click.testing import CliRunner

from modelpick import deserialize_report
from modelpick.cli import main

GOLDEN_DIR = Path(__file__).parent / "goldens" / "cli"


@pytest.fixture(scope="module")
def fixture_dir(tmp_path_factory):
    """Deterministic pool/trace files produced by gen-synthetic itself."""
    out = tmp_path_factory.mktemp("fixture")
    runner = CliRunner()
    result = runner.invoke(
        main, ["gen-synthetic", "--arms", "5", "--samples", "40", "--seed", "7", "--out-dir", str(out)]
    )
    assert result.exit_code == 0, result.output
    return out


def _golden(name: str, text: str) -> None:
    path = GOLDEN_DIR / name
    assert text == path.read_text(encoding="utf-8"), f"output drifted from golden {name}"


class TestReason:
    def test_offline_drone_transcript(self):
        result = CliRunner().invoke(
            main,
            ["reason", "--prompt", "Recommend a model for detecting objects deployed on a drone", "--offline"],
        )
        assert result.exit_code == 0
        payload = json.loads(result.output)
        assert payload["weights"] == {"accuracy": 0.63, "size": 0.25, "complexity": 0.21}
        assert payload["provenance"] == "fallback"
        _golden("reason_offline.json", result.output)

    def test_offline_performs_no_network_calls(self, monkeypatch):
        def refuse(*args, **kwargs):
            raise AssertionError("network touched in offline mode")

        monkeypatch.setattr(socket.socket, "connect", refuse)
        monkeypatch.setenv("MODELPICK_LLM_URL", "http://127.0.0.1:59999/llm")
        result = CliRunner().invoke(main, ["reason", "--prompt", "mobile app", "--offline"])
        assert result.exit_code == 0
        assert json.loads(result.output)["provenance"] == "fallback"

    def test_unconfigured_endpoint_falls_back(self, monkeypatch):
        monkeypatch.delenv("MODELPICK_LLM_URL", raising=False)
        result = CliRunner().invoke(main, ["reason", "--prompt", "cloud batch scoring"])
        assert result.exit_code == 0
        assert json.loads(result.output)["weights"]["accuracy"] == 0.8


class TestGenSynthetic:
    def test_manifest_transcript_and_files(self, fixture_dir):
        result = CliRunner().invoke(
            main,
            ["gen-synthetic", "--arms", "5", "--samples", "40", "--seed", "7", "--out-dir", str(fixture_dir)],
        )
        assert result.exit_code == 0
        manifest = json.loads(result.output)
        assert (fixture_dir / "pool.json").exists()
        assert (fixture_dir / "trace.csv").exists()
        # digests pin determinism across regenerations
        golden = json.loads((GOLDEN_DIR / "gen_synthetic_manifest.json").read_text())
        assert manifest["pool_sha256"] == golden["pool_sha256"]
        assert manifest["trace_sha256"] == golden["trace_sha256"]


class TestRun:
    def test_aggregate_transcript(self, fixture_dir):
        result = CliRunner().invoke(
            main,
            [
                "run", "--pool", str(fixture_dir / "pool.json"), "--trace", str(fixture_dir / "trace.csv"),
                "--strategy", "thompson", "--budget", "60", "--weights", "0.63,0.25,0.21",
                "--seed", "42", "--repetitions", "3",
            ],
        )
        assert result.exit_code == 0, result.output
        report = deserialize_report(result.output)
        assert report.as_dict()["kind"] == "aggregate"
        assert report.repetitions == 3
        _golden("run_aggregate.json", result.output)

    def test_single_repetition_emits_selection_report(self, fixture_dir):
        result = CliRunner().invoke(
            main,
            [
                "run", "--pool", str(fixture_dir / "pool.json"), "--trace", str(fixture_dir / "trace.csv"),
                "--budget", "60", "--weights", "1,0,0", "--seed", "1",
            ],
        )
        assert result.exit_code == 0
        assert deserialize_report(result.output).as_dict()["kind"] == "selection"

    def test_synthetic_source_needs_no_files(self):
        result = CliRunner().invoke(
            main,
            ["run", "--synthetic-arms", "4", "--synthetic-samples", "25", "--budget", "30",
             "--weights", "1,0,0", "--seed", "3"],
        )
        assert result.exit_code == 0
        assert deserialize_report(result.output).pulls_total == 30

    def test_out_writes_file_and_stdout_stays_quiet(self, fixture_dir, tmp_path):
        out = tmp_path / "report.json"
        result = CliRunner().invoke(
            main,
            ["run", "--pool", str(fixture_dir / "pool.json"), "--trace", str(fixture_dir / "trace.csv"),
             "--budget", "20", "--weights", "1,0,0", "--out", str(out)],
        )
        assert result.exit_code == 0
        assert result.output == ""
        assert deserialize_report(out.read_text()).pulls_total == 20

    def test_figures_rendered_alongside_report(self, fixture_dir, tmp_path):
        figdir = tmp_path / "figs"
        result = CliRunner().invoke(
            main,
            ["run", "--pool", str(fixture_dir / "pool.json"), "--trace", str(fixture_dir / "trace.csv"),
             "--budget", "20", "--weights", "1,0,0", "--figures", str(figdir)],
        )
        assert result.exit_code == 0
        names = sorted(p.name for p in figdir.iterdir())
        assert names == ["report_leaderboard.csv", "report_pulls.png", "report_ranking.png", "report_savings.png"]
        header = (figdir / "report_leaderboard.csv").read_text().splitlines()[0]
        assert header == "rank,id,estimated_value,accuracy,pulls,size_mb,complexity_mmac"

    def test_conflicting_sources_fail(self, fixture_dir):
        result = CliRunner().invoke(
            main,
            ["run", "--pool", str(fixture_dir / "pool.json"), "--trace", str(fixture_dir / "trace.csv"),
             "--synthetic-arms", "3", "--budget", "10", "--weights", "1,0,0"],
        )
        assert result.exit_code == 1
        assert "error: " in result.stderr

    def test_bad_weights_diagnostic_on_stderr(self, fixture_dir):
        result = CliRunner().invoke(
            main,
            ["run", "--pool", str(fixture_dir / "pool.json"), "--trace", str(fixture_dir / "trace.csv"),
             "--budget", "10", "--weights", "1,0"],
        )
        assert result.exit_code == 1
        assert result.stderr.startswith("error: ")
        assert result.stderr.count("\n") == 1

    def test_missing_file_is_a_clean_error(self):
        result = CliRunner().invoke(
            main, ["run", "--pool", "nope.json", "--trace", "nope.csv", "--budget", "1", "--weights", "1,0,0"]
        )
        assert result.exit_code == 1


class TestBruteForceAndBenchSelect:
    def test_brute_force_transcript(self, fixture_dir):
        result = CliRunner().invoke(
            main,
            ["brute-force", "--pool", str(fixture_dir / "pool.json"), "--trace", str(fixture_dir / "trace.csv"),
             "--weights", "0.63,0.25,0.21"],
        )
        assert result.exit_code == 0
        report = deserialize_report(result.output)
        assert report.method == "brute_force"
        assert report.eval_savings == 0.0
        _golden("brute_force.json", result.output)

    def test_bench_select_transcript(self, fixture_dir):
        result = CliRunner().invoke(
            main,
            ["bench-select", "--pool", str(fixture_dir / "pool.json"), "--weights", "0.63,0.25,0.21"],
        )
        assert result.exit_code == 0
        report = deserialize_report(result.output)
        assert report.method == "benchmark"
        assert report.pulls_total == 0
        _golden("bench_select.json", result.output)

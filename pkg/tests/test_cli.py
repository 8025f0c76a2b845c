"""Command-line client: outputs, determinism, and the exit-code contract."""

import json

import pytest
from click.testing import CliRunner

from scaletrack.cli import main

runner = CliRunner()


def run(*args):
    return runner.invoke(main, [str(a) for a in args])


@pytest.fixture(scope="module")
def seq_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("cli-data")
    res = run("synth", "zoom", "--out", out, "--length", 8, "--object-size", "48,48",
              "--frame-size", "200,240", "--seed", 3)
    assert res.exit_code == 0, res.output
    return out / "synth-zoom-3"


class TestSynthCommand:
    def test_writes_benchmark_layout(self, tmp_path):
        res = run("synth", "drift", "--out", tmp_path, "--length", 5, "--seed", 2)
        assert res.exit_code == 0, res.output
        root = tmp_path / "synth-drift-2"
        assert sorted(p.name for p in (root / "img").iterdir()) == [
            f"{i:04d}.png" for i in range(1, 6)
        ]
        gt = (root / "groundtruth_rect.txt").read_text().strip().split("\n")
        assert len(gt) == 5
        assert (root / "attributes.txt").read_text().strip() == "FM"

    def test_rejects_malformed_pair_flags(self, tmp_path):
        res = run("synth", "zoom", "--out", tmp_path, "--frame-size", "200")
        assert res.exit_code == 2

    def test_rejects_unknown_kind(self, tmp_path):
        res = run("synth", "wobble", "--out", tmp_path)
        assert res.exit_code == 2  # click choice validation


class TestTrackCommand:
    def test_writes_boxes_and_run(self, seq_dir, tmp_path):
        res = run("track", seq_dir, "--out", tmp_path / "run", "--method", "hrsem")
        assert res.exit_code == 0, res.output
        lines = (tmp_path / "run" / "boxes.csv").read_text().strip().split("\n")
        assert lines[0] == "frame,x,y,w,h"
        assert len(lines) == 9
        assert lines[1].startswith("0,")
        run_doc = json.loads((tmp_path / "run" / "run.json").read_text())
        assert run_doc["frames"] == 8
        assert run_doc["config"]["method"] == "hrsem"
        assert not (tmp_path / "run" / "timing.json").exists()

    def test_reruns_are_byte_identical(self, seq_dir, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        assert run("track", seq_dir, "--out", a, "--method", "hrsem").exit_code == 0
        assert run("track", seq_dir, "--out", b, "--method", "hrsem").exit_code == 0
        assert (a / "boxes.csv").read_bytes() == (b / "boxes.csv").read_bytes()
        assert (a / "run.json").read_bytes() == (b / "run.json").read_bytes()

    def test_timing_goes_to_its_own_file(self, seq_dir, tmp_path):
        res = run("track", seq_dir, "--out", tmp_path / "t", "--method", "rrsem", "--timing")
        assert res.exit_code == 0
        timing = json.loads((tmp_path / "t" / "timing.json").read_text())
        assert timing["fps"] > 0
        run_doc = json.loads((tmp_path / "t" / "run.json").read_text())
        assert "fps" not in run_doc  # wall clock never contaminates run.json

    def test_config_file_flows_through(self, seq_dir, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text('{"method": "dsst", "scale_count": 9}')
        res = run("track", seq_dir, "--out", tmp_path / "c", "--config", cfg)
        assert res.exit_code == 0
        run_doc = json.loads((tmp_path / "c" / "run.json").read_text())
        assert run_doc["config"]["method"] == "dsst"
        assert run_doc["config"]["scale_count"] == 9

    def test_one_frame_sequence_echoes_init(self, seq_dir, tmp_path):
        solo = tmp_path / "solo" / "img"
        solo.mkdir(parents=True)
        first = sorted((seq_dir / "img").iterdir())[0]
        (solo / first.name).write_bytes(first.read_bytes())
        (tmp_path / "solo" / "groundtruth_rect.txt").write_text("21,31,40,44\n")
        res = run("track", tmp_path / "solo", "--out", tmp_path / "solo-out")
        assert res.exit_code == 0
        lines = (tmp_path / "solo-out" / "boxes.csv").read_text().strip().split("\n")
        assert len(lines) == 2
        assert lines[1] == "0,20.0000,30.0000,40.0000,44.0000"

    def test_missing_ground_truth_without_init_is_input_error(self, seq_dir, tmp_path):
        bare = tmp_path / "bare" / "img"
        bare.mkdir(parents=True)
        for p in sorted((seq_dir / "img").iterdir())[:2]:
            (bare / p.name).write_bytes(p.read_bytes())
        res = run("track", tmp_path / "bare", "--out", tmp_path / "x")
        assert res.exit_code == 2
        ok = run("track", tmp_path / "bare", "--out", tmp_path / "y", "--init", "40,40,48,48")
        assert ok.exit_code == 0

    def test_nonexistent_sequence_is_input_error(self, tmp_path):
        res = run("track", "/no/such/sequence", "--out", tmp_path / "z")
        assert res.exit_code == 2

    def test_malformed_init_is_input_error(self, seq_dir, tmp_path):
        assert run("track", seq_dir, "--out", tmp_path / "m", "--init", "1,2,3").exit_code == 2
        assert run("track", seq_dir, "--out", tmp_path / "m", "--init", "a,b,c,d").exit_code == 2
        assert run("track", seq_dir, "--out", tmp_path / "m", "--init", "1,2,-3,4").exit_code == 2

    def test_does_not_mutate_the_input_sequence(self, seq_dir, tmp_path):
        before = {p.name: p.read_bytes() for p in sorted((seq_dir / "img").iterdir())}
        before["gt"] = (seq_dir / "groundtruth_rect.txt").read_bytes()
        assert run("track", seq_dir, "--out", tmp_path / "ro").exit_code == 0
        after = {p.name: p.read_bytes() for p in sorted((seq_dir / "img").iterdir())}
        after["gt"] = (seq_dir / "groundtruth_rect.txt").read_bytes()
        assert before == after


@pytest.fixture(scope="module")
def dataset(tmp_path_factory):
    out = tmp_path_factory.mktemp("cli-bench-data")
    assert run("synth", "zoom", "--out", out, "--length", 6, "--object-size", "48,48",
               "--frame-size", "200,240", "--seed", 5).exit_code == 0
    assert run("synth", "drift", "--out", out, "--length", 6, "--seed", 6).exit_code == 0
    return out


class TestBenchCommand:
    def test_writes_reports_curves_and_comparison(self, dataset, tmp_path):
        res = run("bench", dataset, "--out", tmp_path, "--method", "hrsem", "--method", "dsst",
                  "--workers", 2)
        assert res.exit_code == 0, res.output
        for method in ("hrsem", "dsst"):
            report = json.loads((tmp_path / f"report_{method}.json").read_text())
            assert report["method"] == method
            assert len(report["sequences"]) == 2
            prec = (tmp_path / f"precision_{method}.csv").read_text().strip().split("\n")
            succ = (tmp_path / f"success_{method}.csv").read_text().strip().split("\n")
            assert prec[0] == "threshold,value" and len(prec) == 52
            assert succ[0] == "threshold,value" and len(succ) == 102
        comparison = (tmp_path / "comparison.csv").read_text().strip().split("\n")
        assert comparison[0] == "method,sequences,precision_at_20,success_at_0.5,auc"
        assert len(comparison) == 3

    def test_reruns_are_byte_identical(self, dataset, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        assert run("bench", dataset, "--out", a, "--method", "rrsem").exit_code == 0
        assert run("bench", dataset, "--out", b, "--method", "rrsem").exit_code == 0
        for name in ("report_rrsem.json", "precision_rrsem.csv", "success_rrsem.csv", "comparison.csv"):
            assert (a / name).read_bytes() == (b / name).read_bytes(), name

    def test_empty_dataset_is_input_error(self, tmp_path):
        empty = tmp_path / "empty"
        empty.mkdir()
        assert run("bench", empty, "--out", tmp_path / "o").exit_code == 2

    def test_partial_failure_is_recorded_not_fatal(self, dataset, tmp_path):
        # corrupt one sequence's ground truth: that sequence fails, the run continues
        broken = tmp_path / "mixed"
        broken.mkdir()
        import shutil

        for src in sorted(p for p in dataset.iterdir() if p.is_dir()):
            shutil.copytree(src, broken / src.name)
        victim = sorted(broken.iterdir())[0]
        (victim / "groundtruth_rect.txt").write_text("1,1,2,2\n")
        res = run("bench", broken, "--out", tmp_path / "mixed-out", "--method", "hrsem")
        assert res.exit_code == 0, res.output
        report = json.loads((tmp_path / "mixed-out" / "report_hrsem.json").read_text())
        assert len(report["failures"]) == 1
        assert len(report["sequences"]) == 1


class TestOracleCommand:
    def test_green_run_exits_zero(self):
        res = run("oracle")
        assert res.exit_code == 0, res.output
        assert res.output.strip().endswith("oracles passed")
        assert "FAIL" not in res.output

    def test_seed_changes_inputs_not_verdict(self):
        for seed in (1, 7):
            assert run("oracle", "--seed", seed).exit_code == 0

    def test_forced_failure_exits_one_and_names_the_oracle(self):
        res = run("oracle", "--force-fail", "direct-dft")
        assert res.exit_code == 1
        assert "FAIL  direct-dft" in res.output

    def test_unknown_oracle_name_is_input_error(self):
        assert run("oracle", "--force-fail", "bogus").exit_code == 2

import hashlib
import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from rehabkit import (
    Task,
    load_manifest,
    parse_count_results,
    serialize_clip_predictions,
    serialize_clip_truth,
)
from rehabkit.cli import main
from rehabkit.streams import ClipPrediction


@pytest.fixture(scope="module")
def runner():
    return CliRunner()


@pytest.fixture(scope="module")
def corpus_dir(tmp_path_factory, runner):
    """Small clean+noisy synthetic corpus shared by the CLI tests."""
    out = tmp_path_factory.mktemp("corpus")
    result = runner.invoke(main, [
        "synth", "--videos", "20", "--seed", "5", "--flip-prob", "0.1",
        "-o", str(out),
    ])
    assert result.exit_code == 0, result.output
    return out


def invoke_ok(runner, args):
    result = runner.invoke(main, [str(a) for a in args])
    assert result.exit_code == 0, result.output
    return result


def tree_digest(directory: Path) -> dict:
    return {
        p.relative_to(directory).as_posix(): hashlib.sha256(p.read_bytes()).hexdigest()
        for p in sorted(directory.rglob("*"))
        if p.is_file()
    }


class TestSynth:
    def test_writes_manifest_and_streams(self, corpus_dir):
        assert (corpus_dir / "manifest.jsonl").exists()
        assert (corpus_dir / "streams.jsonl").exists()
        assert (corpus_dir / "streams_clean.jsonl").exists()
        assert (corpus_dir / "run.json").exists()
        manifest = load_manifest(corpus_dir / "manifest.jsonl")
        assert len(manifest.videos) == 20

    def test_run_metadata_captures_flags(self, corpus_dir):
        meta = json.loads((corpus_dir / "run.json").read_text())
        assert meta["command"] == "synth"
        assert meta["flags"]["seed"] == 5
        assert meta["flags"]["flip_prob"] == 0.1
        assert meta["format_versions"]["pick-streams"] == 1


class TestCount:
    def test_clean_corpus_counts_match_truth(self, runner, corpus_dir, tmp_path):
        out = tmp_path / "counts"
        invoke_ok(runner, ["count", "--streams", corpus_dir / "streams_clean.jsonl", "-o", out])
        manifest = load_manifest(corpus_dir / "manifest.jsonl")
        truth = {seg.segment_id: seg.true_count for seg in manifest.counting_segments}
        records = parse_count_results((out / "counts.jsonl").read_bytes())
        assert len(records) == 20
        for record in records:
            assert record.count == truth[record.segment_id]

    def test_filter_flags_are_honored(self, runner, corpus_dir, tmp_path):
        noisy = corpus_dir / "streams.jsonl"
        out_raw = tmp_path / "raw"
        out_filtered = tmp_path / "filtered"
        invoke_ok(runner, ["count", "--streams", noisy, "--fil1", 0, "--fil0", 0, "-o", out_raw])
        invoke_ok(runner, ["count", "--streams", noisy, "-o", out_filtered])
        raw = parse_count_results((out_raw / "counts.jsonl").read_bytes())
        filtered = parse_count_results((out_filtered / "counts.jsonl").read_bytes())
        assert sum(r.count for r in raw) > sum(r.count for r in filtered)


class TestEvaluateCounting:
    def test_clean_pipeline_reports_zero_mae(self, runner, corpus_dir, tmp_path):
        counts = tmp_path / "counts"
        report_dir = tmp_path / "report"
        invoke_ok(runner, ["count", "--streams", corpus_dir / "streams_clean.jsonl", "-o", counts])
        invoke_ok(runner, [
            "evaluate-counting", "--counts", counts / "counts.jsonl",
            "--manifest", corpus_dir / "manifest.jsonl", "-o", report_dir,
        ])
        report = json.loads((report_dir / "counting_report.json").read_text())
        assert report["mae"] == 0.0
        assert report["bucket_e0"] == 100.0
        table = (report_dir / "counting_report.txt").read_text()
        assert "|e| = 0 [%]" in table
        assert "Overall" in table


class TestEvaluateClassification:
    @pytest.fixture()
    def prediction_files(self, tmp_path):
        preds = []
        truth = {}
        for i in range(8):
            scores = [0.0] * 25
            scores[i % 25] = 1.0
            preds.append(ClipPrediction(f"clip-{i}", Task.RECOGNITION, tuple(scores)))
            truth[f"clip-{i}"] = i % 25 if i != 0 else 1  # one mistake
        pred_path = tmp_path / "preds.jsonl"
        truth_path = tmp_path / "truth.jsonl"
        pred_path.write_text(serialize_clip_predictions(preds))
        truth_path.write_text(serialize_clip_truth(truth))
        return pred_path, truth_path

    def test_report_and_table(self, runner, prediction_files, tmp_path):
        pred_path, truth_path = prediction_files
        out = tmp_path / "rec"
        invoke_ok(runner, [
            "evaluate-recognition", "--predictions", pred_path, "--truth", truth_path,
            "--method-name", "probe", "-o", out,
        ])
        report = json.loads((out / "classification_report.json").read_text())
        assert report["test"]["top1_accuracy"] == pytest.approx(87.5)
        assert report["test"]["task"] == "recognition"
        table = (out / "classification_table.txt").read_text()
        assert "Val. [%]" in table and "Test [%]" in table and "probe" in table

    def test_val_set_fills_val_column(self, runner, prediction_files, tmp_path):
        pred_path, truth_path = prediction_files
        out = tmp_path / "rec-val"
        invoke_ok(runner, [
            "evaluate-recognition", "--predictions", pred_path, "--truth", truth_path,
            "--val-predictions", pred_path, "--val-truth", truth_path, "-o", out,
        ])
        report = json.loads((out / "classification_report.json").read_text())
        assert "val" in report
        table = (out / "classification_table.txt").read_text()
        assert "87.50" in table

    def test_form_task_uses_two_classes(self, runner, tmp_path):
        preds = [ClipPrediction("c0", Task.FORM, (0.9, 0.1)), ClipPrediction("c1", Task.FORM, (0.2, 0.8))]
        truth = {"c0": 0, "c1": 0}
        pred_path = tmp_path / "form.jsonl"
        truth_path = tmp_path / "form_truth.jsonl"
        pred_path.write_text(serialize_clip_predictions(preds))
        truth_path.write_text(serialize_clip_truth(truth))
        out = tmp_path / "form-out"
        invoke_ok(runner, [
            "evaluate-form", "--predictions", pred_path, "--truth", truth_path, "-o", out,
        ])
        report = json.loads((out / "classification_report.json").read_text())
        assert report["test"]["top1_accuracy"] == 50.0
        assert len(report["test"]["confusion"]) == 2


class TestSplit:
    def test_loocv_writes_three_files_with_held_out_subject(self, runner, corpus_dir, tmp_path):
        out = tmp_path / "folds"
        invoke_ok(runner, [
            "split", "--manifest", corpus_dir / "manifest.jsonl",
            "--mode", "loocv", "--subject", "S-I", "--seed", "3", "-o", out,
        ])
        manifest = load_manifest(corpus_dir / "manifest.jsonl")
        subject_videos = {v.video_id for v in manifest.videos if v.subject_id == "S-I"}
        test_ids = set((out / "test.txt").read_text().split())
        assert test_ids == subject_videos
        train_ids = set((out / "train.txt").read_text().split())
        val_ids = set((out / "val.txt").read_text().split())
        assert not test_ids & (train_ids | val_ids)
        assert train_ids | val_ids | test_ids == {v.video_id for v in manifest.videos}

    def test_equal_mode(self, runner, corpus_dir, tmp_path):
        out = tmp_path / "eq"
        invoke_ok(runner, [
            "split", "--manifest", corpus_dir / "manifest.jsonl",
            "--mode", "equal", "--seed", "3", "-o", out,
        ])
        for name in ("train.txt", "val.txt", "test.txt"):
            assert (out / name).exists()


class TestSegments:
    def test_sampled_manifest_is_loadable(self, runner, corpus_dir, tmp_path):
        out = tmp_path / "seg"
        result = invoke_ok(runner, [
            "segments", "--manifest", corpus_dir / "manifest.jsonl",
            "--n-samples", 4, "--seed", 2, "-o", out,
        ])
        sampled = load_manifest(out / "manifest.jsonl")
        assert len(sampled.videos) == 20
        assert len(sampled.counting_segments) >= 20


class TestAblate:
    def test_table6_preset_emits_13_rows(self, runner, corpus_dir, tmp_path):
        out = tmp_path / "abl"
        invoke_ok(runner, [
            "ablate", "--streams", corpus_dir / "streams.jsonl",
            "--manifest", corpus_dir / "manifest.jsonl", "-o", out,
        ])
        rows = json.loads((out / "ablation.json").read_text())
        assert len(rows) == 13
        assert rows[0] == {"fil1_max_len": 0, "fil0_max_len": 0, "mae": rows[0]["mae"]}
        best = next(r for r in rows if r["fil1_max_len"] == 5 and r["fil0_max_len"] == 3)
        assert rows[0]["mae"] > best["mae"]

    def test_explicit_configs(self, runner, corpus_dir, tmp_path):
        out = tmp_path / "abl2"
        invoke_ok(runner, [
            "ablate", "--streams", corpus_dir / "streams_clean.jsonl",
            "--manifest", corpus_dir / "manifest.jsonl",
            "--configs", "0,0;5,3", "-o", out,
        ])
        rows = json.loads((out / "ablation.json").read_text())
        assert len(rows) == 2
        assert rows[1]["mae"] == 0.0


class TestDeterminism:
    def test_synth_is_byte_identical_across_reruns(self, runner, tmp_path):
        digests = []
        for name in ("one", "two"):
            synth_dir = tmp_path / name
            invoke_ok(runner, [
                "synth", "--videos", 6, "--seed", 11, "--flip-prob", 0.05, "-o", synth_dir,
            ])
            digests.append(tree_digest(synth_dir))
        assert digests[0] == digests[1]

    def test_count_is_byte_identical_for_identical_inputs(self, runner, corpus_dir, tmp_path):
        digests = []
        for name in ("one", "two"):
            count_dir = tmp_path / name
            invoke_ok(runner, [
                "count", "--streams", corpus_dir / "streams.jsonl", "-o", count_dir,
            ])
            digests.append(tree_digest(count_dir))
        assert digests[0] == digests[1]


class TestFailureModes:
    def test_wrong_format_is_a_validation_error(self, runner, corpus_dir, tmp_path):
        result = runner.invoke(main, [
            "count", "--streams", str(corpus_dir / "manifest.jsonl"), "-o", str(tmp_path / "x"),
        ])
        assert result.exit_code == 2
        assert "error: validation:" in result.output

    def test_unwritable_output_is_an_io_error(self, runner, corpus_dir, tmp_path):
        blocker = tmp_path / "blocker"
        blocker.write_text("file, not a directory")
        result = runner.invoke(main, [
            "count", "--streams", str(corpus_dir / "streams.jsonl"),
            "-o", str(blocker / "sub"),
        ])
        assert result.exit_code == 3
        assert "error: io:" in result.output

    def test_ablate_requires_matching_segment(self, runner, corpus_dir, tmp_path):
        from rehabkit import serialize_pick_streams, PickStream, FrameInterval

        rogue = PickStream("not-in-manifest", FrameInterval(0, 3), (0.0, 1.0, 0.0))
        path = tmp_path / "rogue.jsonl"
        path.write_text(serialize_pick_streams([rogue]))
        result = runner.invoke(main, [
            "ablate", "--streams", str(path),
            "--manifest", str(corpus_dir / "manifest.jsonl"), "-o", str(tmp_path / "out"),
        ])
        assert result.exit_code == 2
        assert "not-in-manifest" in result.output


class TestHelp:
    @pytest.mark.parametrize("command", [
        "count", "evaluate-recognition", "evaluate-form", "evaluate-counting",
        "split", "segments", "synth", "ablate",
    ])
    def test_every_subcommand_documents_its_flags(self, runner, command):
        result = runner.invoke(main, [command, "--help"])
        assert result.exit_code == 0
        assert "--output-dir" in result.output
        assert "default" in result.output.lower() or "required" in result.output.lower()

    def test_group_lists_all_subcommands(self, runner):
        result = runner.invoke(main, ["--help"])
        for command in ("count", "evaluate-recognition", "evaluate-form", "evaluate-counting",
                        "split", "segments", "synth", "ablate"):
            assert command in result.output

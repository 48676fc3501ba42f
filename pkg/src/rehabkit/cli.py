"""Batch command-line interface.

Every command reads/writes the versioned line formats documented in the
package (session-manifest v1, pick-streams v1, clip-predictions v1,
clip-truth v1, count-results v1), writes its artifacts atomically into an
output directory together with a run.json capturing the exact flags and
seed, and is fully deterministic: identical inputs and seed produce
byte-identical outputs.

Exit codes: 0 success, 2 validation error, 3 I/O error. Failures print a
single line `error: <category>: <message>` to stderr.
"""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click

from . import __version__
from ._lineio import write_text_atomic
from .errors import ValidationError
from .evaluation import (
    SplitMode,
    SplitSpec,
    counting_report,
    make_splits,
    render_classification_table,
    render_counting_table,
    top1,
    write_split,
)
from .manifest import (
    MANIFEST_FORMAT,
    load_manifest,
    sample_counting_segments,
    save_manifest,
    with_segments,
)
from .repcount import FilterConfig, count_repetitions
from .results import COUNT_RESULTS_FORMAT, CountRecord, parse_count_results, serialize_count_results
from .streams import (
    CLIP_PREDICTION_FORMAT,
    CLIP_TRUTH_FORMAT,
    PICK_STREAM_FORMAT,
    Task,
    parse_clip_predictions,
    parse_clip_truth,
    parse_pick_streams,
    serialize_pick_streams,
)
from .synthetic import NoiseModel, TABLE6_CONFIGS, ablation_sweep, gen_corpus

FORMAT_VERSIONS = dict(
    [MANIFEST_FORMAT, PICK_STREAM_FORMAT, CLIP_PREDICTION_FORMAT, CLIP_TRUTH_FORMAT, COUNT_RESULTS_FORMAT]
)


def _guarded(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ValidationError as e:
            click.echo(f"error: validation: {_one_line(e)}", err=True)
            sys.exit(2)
        except OSError as e:
            click.echo(f"error: io: {_one_line(e)}", err=True)
            sys.exit(3)

    return wrapper


def _one_line(e: BaseException) -> str:
    return " ; ".join(str(e).splitlines()) or type(e).__name__


def _write_run_metadata(output_dir: Path, command: str, flags: dict) -> None:
    output_dir.mkdir(parents=True, exist_ok=True)
    meta = {
        "command": command,
        "flags": flags,
        "format_versions": FORMAT_VERSIONS,
        "package_version": __version__,
    }
    write_text_atomic(output_dir / "run.json", json.dumps(meta, indent=2, sort_keys=True) + "\n")


def _write_json(path: Path, payload) -> None:
    write_text_atomic(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


_output_dir_option = click.option(
    "-o",
    "--output-dir",
    type=click.Path(path_type=Path),
    default=Path("results"),
    show_default=True,
    help="Directory for output artifacts and run.json.",
)

_threshold_option = click.option(
    "--threshold",
    type=float,
    default=0.5,
    show_default=True,
    help="Binarization threshold; probabilities >= threshold become 1.",
)


@click.group()
@click.version_option(version=__version__, prog_name="rehabkit")
def main():
    """Offline analysis toolkit for hand-rehabilitation exercise sessions."""


@main.command()
@click.option("--streams", "streams_path", type=click.Path(exists=True, path_type=Path),
              required=True, help="pick-streams v1 file to count.")
@_threshold_option
@click.option("--fil1", type=int, default=5, show_default=True,
              help="Erase 1-runs up to this length (0 disables).")
@click.option("--fil0", type=int, default=3, show_default=True,
              help="Fill 0-runs up to this length (0 disables).")
@_output_dir_option
@_guarded
def count(streams_path: Path, threshold: float, fil1: int, fil0: int, output_dir: Path):
    """Count repetitions per stream; writes counts.jsonl (count-results v1)."""
    config = FilterConfig(fil1, fil0)
    streams = parse_pick_streams(streams_path.read_bytes())
    records = []
    for stream in streams:
        result = count_repetitions(stream, threshold, config)
        records.append(
            CountRecord(stream.video_id, stream.segment, result.count, result.edge_positions)
        )
    _write_run_metadata(output_dir, "count", {
        "streams": str(streams_path), "threshold": threshold, "fil1": fil1, "fil0": fil0,
    })
    write_text_atomic(output_dir / "counts.jsonl", serialize_count_results(records))
    click.echo(f"counted {len(records)} stream(s) -> {output_dir / 'counts.jsonl'}")


@main.command("evaluate-counting")
@click.option("--counts", "counts_path", type=click.Path(exists=True, path_type=Path),
              required=True, help="count-results v1 file (from `count`).")
@click.option("--manifest", "manifest_path", type=click.Path(exists=True, path_type=Path),
              required=True, help="session-manifest v1 file with counting segments.")
@_output_dir_option
@_guarded
def evaluate_counting(counts_path: Path, manifest_path: Path, output_dir: Path):
    """Score predicted counts against manifest segments; writes MAE/error-bucket report."""
    manifest = load_manifest(manifest_path)
    predictions = {r.segment_id: r.count for r in parse_count_results(counts_path.read_bytes())}
    report = counting_report(predictions, manifest.counting_segments, manifest)
    _write_run_metadata(output_dir, "evaluate-counting", {
        "counts": str(counts_path), "manifest": str(manifest_path),
    })
    _write_json(output_dir / "counting_report.json", report.to_dict())
    write_text_atomic(output_dir / "counting_report.txt", render_counting_table(report))
    click.echo(f"MAE {report.mae:.2f} over {report.n_samples} segment(s) -> {output_dir}")


def _evaluate_classification(task: Task, predictions_path: Path, truth_path: Path,
                             val_predictions_path: Path | None, val_truth_path: Path | None,
                             method_name: str, output_dir: Path, command: str):
    predictions = parse_clip_predictions(predictions_path.read_bytes())
    truth = parse_clip_truth(truth_path.read_bytes())
    test_report = top1(predictions, truth, task)

    val_report = None
    if val_predictions_path is not None:
        if val_truth_path is None:
            raise ValidationError("--val-predictions requires --val-truth")
        val_report = top1(
            parse_clip_predictions(val_predictions_path.read_bytes()),
            parse_clip_truth(val_truth_path.read_bytes()),
            task,
        )

    _write_run_metadata(output_dir, command, {
        "predictions": str(predictions_path),
        "truth": str(truth_path),
        "val_predictions": str(val_predictions_path) if val_predictions_path else None,
        "val_truth": str(val_truth_path) if val_truth_path else None,
        "method_name": method_name,
    })
    payload = {"test": test_report.to_dict()}
    if val_report is not None:
        payload["val"] = val_report.to_dict()
    _write_json(output_dir / "classification_report.json", payload)
    table = render_classification_table([
        (method_name, val_report.top1_accuracy if val_report else None, test_report.top1_accuracy)
    ])
    write_text_atomic(output_dir / "classification_table.txt", table)
    click.echo(f"top-1 accuracy {test_report.top1_accuracy:.2f}% -> {output_dir}")


def _classification_command(name: str, task: Task, doc: str):
    @main.command(name, help=doc)
    @click.option("--predictions", "predictions_path", type=click.Path(exists=True, path_type=Path),
                  required=True, help="clip-predictions v1 file for the test set.")
    @click.option("--truth", "truth_path", type=click.Path(exists=True, path_type=Path),
                  required=True, help="clip-truth v1 file for the test set.")
    @click.option("--val-predictions", "val_predictions_path",
                  type=click.Path(exists=True, path_type=Path), default=None,
                  help="Optional clip-predictions v1 file for the validation set.")
    @click.option("--val-truth", "val_truth_path",
                  type=click.Path(exists=True, path_type=Path), default=None,
                  help="Optional clip-truth v1 file for the validation set.")
    @click.option("--method-name", default="engine", show_default=True,
                  help="Row name in the rendered accuracy table.")
    @_output_dir_option
    @_guarded
    def _cmd(predictions_path, truth_path, val_predictions_path, val_truth_path,
             method_name, output_dir):
        _evaluate_classification(task, predictions_path, truth_path, val_predictions_path,
                                 val_truth_path, method_name, output_dir, name)

    return _cmd


_classification_command(
    "evaluate-recognition", Task.RECOGNITION,
    "Score 25-way exercise-recognition predictions (top-1 accuracy, confusion matrix).",
)
_classification_command(
    "evaluate-form", Task.FORM,
    "Score binary form-evaluation predictions (top-1 accuracy, confusion matrix).",
)


@main.command()
@click.option("--manifest", "manifest_path", type=click.Path(exists=True, path_type=Path),
              required=True, help="session-manifest v1 file.")
@click.option("--mode", type=click.Choice([m.value for m in SplitMode]), required=True,
              help="Split protocol: stratified fractions or leave-one-subject-out.")
@click.option("--subject", default=None, help="Test subject id (required for loocv).")
@click.option("--seed", type=int, default=0, show_default=True, help="Shuffle seed.")
@click.option("--train-fraction", type=float, default=0.8, show_default=True,
              help="Train share (equal mode).")
@click.option("--val-fraction", type=float, default=0.1, show_default=True,
              help="Validation share (equal mode); the rest is the test share.")
@_output_dir_option
@_guarded
def split(manifest_path: Path, mode: str, subject: str | None, seed: int,
          train_fraction: float, val_fraction: float, output_dir: Path):
    """Write train.txt / val.txt / test.txt video-id lists for a split protocol."""
    manifest = load_manifest(manifest_path)
    spec = SplitSpec(SplitMode(mode), seed=seed, test_subject=subject,
                     train_fraction=train_fraction, val_fraction=val_fraction)
    result = make_splits(manifest, spec)
    for warning in result.warnings:
        click.echo(f"warning: {warning}", err=True)
    _write_run_metadata(output_dir, "split", {
        "manifest": str(manifest_path), "mode": mode, "subject": subject, "seed": seed,
        "train_fraction": train_fraction, "val_fraction": val_fraction,
    })
    write_split(result, output_dir)
    click.echo(
        f"split {len(result.train)}/{len(result.val)}/{len(result.test)} "
        f"(train/val/test) -> {output_dir}"
    )


@main.command()
@click.option("--manifest", "manifest_path", type=click.Path(exists=True, path_type=Path),
              required=True, help="session-manifest v1 file.")
@click.option("--n-samples", type=int, required=True,
              help="Counting segments to sample per video.")
@click.option("--seed", type=int, default=0, show_default=True, help="Sampling seed.")
@click.option("--max-count", type=int, default=20, show_default=True,
              help="Largest allowed true repetition count per segment.")
@_output_dir_option
@_guarded
def segments(manifest_path: Path, n_samples: int, seed: int, max_count: int, output_dir: Path):
    """Materialize sampled counting segments; writes manifest.jsonl with the new segments."""
    manifest = load_manifest(manifest_path)
    sampled = []
    for video in manifest.videos:
        if not video.repetitions:
            click.echo(f"warning: video {video.video_id!r} has no repetitions; skipped", err=True)
            continue
        sample = sample_counting_segments(video, n_samples, seed, max_count)
        if sample.exhausted:
            click.echo(
                f"warning: video {video.video_id!r} has only {len(sample.segments)} distinct "
                f"segment(s); requested {n_samples}", err=True,
            )
        sampled.extend(sample.segments)
    _write_run_metadata(output_dir, "segments", {
        "manifest": str(manifest_path), "n_samples": n_samples, "seed": seed,
        "max_count": max_count,
    })
    save_manifest(with_segments(manifest, sampled), output_dir / "manifest.jsonl")
    click.echo(f"sampled {len(sampled)} segment(s) -> {output_dir / 'manifest.jsonl'}")


@main.command()
@click.option("--videos", "n_videos", type=int, default=100, show_default=True,
              help="Number of videos to generate.")
@click.option("--seed", type=int, default=0, show_default=True, help="Corpus seed.")
@click.option("--subjects", "n_subjects", type=int, default=9, show_default=True,
              help="Subjects assigned round-robin.")
@click.option("--rep-len-min", type=int, default=6, show_default=True)
@click.option("--rep-len-max", type=int, default=40, show_default=True)
@click.option("--gap-min", type=int, default=4, show_default=True)
@click.option("--gap-max", type=int, default=12, show_default=True)
@click.option("--pick-width", type=int, default=6, show_default=True,
              help="Frames marked as the pick at each repetition start.")
@click.option("--flip-prob", type=float, default=0.0, show_default=True,
              help="Per-frame label flip probability.")
@click.option("--spike-rate", type=float, default=0.0, show_default=True,
              help="Expected injected 1-spikes per 100 frames.")
@click.option("--dropout-rate", type=float, default=0.0, show_default=True,
              help="Expected erased pick-frames per pick.")
@click.option("--noise-seed", type=int, default=None,
              help="Noise seed (defaults to --seed).")
@_output_dir_option
@_guarded
def synth(n_videos, seed, n_subjects, rep_len_min, rep_len_max, gap_min, gap_max,
          pick_width, flip_prob, spike_rate, dropout_rate, noise_seed, output_dir: Path):
    """Generate a seeded synthetic corpus: manifest.jsonl (session-manifest v1)
    plus streams.jsonl (pick-streams v1).

    With any noise flag set, streams.jsonl is the noisy corpus and the clean
    streams are kept alongside in streams_clean.jsonl.
    """
    noisy = flip_prob > 0 or spike_rate > 0 or dropout_rate > 0
    noise = None
    if noisy:
        noise = NoiseModel(flip_prob, spike_rate, dropout_rate,
                           seed if noise_seed is None else noise_seed)
    kwargs = dict(
        n_subjects=n_subjects,
        rep_len_range=(rep_len_min, rep_len_max),
        gap_range=(gap_min, gap_max),
        pick_width=pick_width,
    )
    corpus = gen_corpus(n_videos, seed, noise=noise, **kwargs)
    _write_run_metadata(output_dir, "synth", {
        "videos": n_videos, "seed": seed, "subjects": n_subjects,
        "rep_len_min": rep_len_min, "rep_len_max": rep_len_max,
        "gap_min": gap_min, "gap_max": gap_max, "pick_width": pick_width,
        "flip_prob": flip_prob, "spike_rate": spike_rate, "dropout_rate": dropout_rate,
        "noise_seed": noise_seed,
    })
    save_manifest(corpus.manifest, output_dir / "manifest.jsonl")
    write_text_atomic(output_dir / "streams.jsonl", serialize_pick_streams(list(corpus.streams)))
    if noisy:
        clean = gen_corpus(n_videos, seed, noise=None, **kwargs)
        write_text_atomic(
            output_dir / "streams_clean.jsonl", serialize_pick_streams(list(clean.streams))
        )
    click.echo(f"generated {n_videos} video(s) -> {output_dir}")


@main.command()
@click.option("--streams", "streams_path", type=click.Path(exists=True, path_type=Path),
              required=True, help="pick-streams v1 file to sweep.")
@click.option("--manifest", "manifest_path", type=click.Path(exists=True, path_type=Path),
              required=True,
              help="session-manifest v1 file with a counting segment per stream.")
@click.option("--preset", type=click.Choice(["table6"]), default=None,
              help="Named filter-config sweep (13 configurations).")
@click.option("--configs", "configs_text", default=None,
              help='Explicit sweep, e.g. "0,0;5,3" (fil1,fil0 pairs separated by ;).')
@_threshold_option
@_output_dir_option
@_guarded
def ablate(streams_path: Path, manifest_path: Path, preset: str | None,
           configs_text: str | None, threshold: float, output_dir: Path):
    """Sweep filter configurations over a ground-truthed corpus; writes MAE per config."""
    if preset is None and configs_text is None:
        preset = "table6"
    if configs_text is not None:
        configs = _parse_configs(configs_text)
    else:
        configs = list(TABLE6_CONFIGS)

    manifest = load_manifest(manifest_path)
    truth = {seg.segment_id: seg.true_count for seg in manifest.counting_segments}
    corpus = []
    for stream in parse_pick_streams(streams_path.read_bytes()):
        key = f"{stream.video_id}:{stream.segment.start}-{stream.segment.end}"
        if key not in truth:
            raise ValidationError(f"no counting segment in the manifest for stream {key}")
        corpus.append((stream, truth[key]))

    rows = ablation_sweep(corpus, configs, threshold)
    _write_run_metadata(output_dir, "ablate", {
        "streams": str(streams_path), "manifest": str(manifest_path),
        "preset": preset, "configs": configs_text, "threshold": threshold,
    })
    _write_json(output_dir / "ablation.json", [
        {"fil1_max_len": r.config.fil1_max_len, "fil0_max_len": r.config.fil0_max_len,
         "mae": r.mae}
        for r in rows
    ])
    lines = [f"{'fil1':>4}  {'fil0':>4}  {'MAE':>8}", "----  ----  --------"]
    for r in rows:
        lines.append(f"{r.config.fil1_max_len:>4}  {r.config.fil0_max_len:>4}  {r.mae:>8.2f}")
    write_text_atomic(output_dir / "ablation.txt", "\n".join(lines) + "\n")
    click.echo(f"swept {len(rows)} config(s) over {len(corpus)} stream(s) -> {output_dir}")


def _parse_configs(text: str) -> list[FilterConfig]:
    configs = []
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        pieces = part.split(",")
        if len(pieces) != 2:
            raise ValidationError(f"bad config {part!r}: expected fil1,fil0")
        try:
            configs.append(FilterConfig(int(pieces[0]), int(pieces[1])))
        except ValueError:
            raise ValidationError(f"bad config {part!r}: expected integers") from None
    if not configs:
        raise ValidationError("no filter configs given")
    return configs


if __name__ == "__main__":
    main()

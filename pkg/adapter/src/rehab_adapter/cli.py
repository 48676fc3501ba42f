"""Adapter CLI, mirroring the engine's conventions: output directory with
atomic writes, explicit seeds, versioned file formats, exit code 2 on
validation failures and 3 on I/O failures."""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click

from .backends import infer_clip_predictions, infer_pick_stream
from .errors import AdapterError
from .formats import clip_prediction_lines, pick_stream_lines, write_text_atomic
from .spec import Backend, BackendSpec, StubMode


def _guarded(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except AdapterError as e:
            click.echo(f"error: validation: {e}", err=True)
            sys.exit(2)
        except OSError as e:
            click.echo(f"error: io: {e}", err=True)
            sys.exit(3)

    return wrapper


def _build_spec(backend, weights, frame_sampling, device, seed, stub_mode, manifest, pick_width):
    return BackendSpec(
        backend=Backend(backend),
        weights_path=Path(weights) if weights else None,
        frame_sampling=frame_sampling,
        device=device,
        seed=seed,
        stub_mode=StubMode(stub_mode),
        manifest_path=Path(manifest) if manifest else None,
        pick_width=pick_width,
    )


_backend_options = [
    click.option("--backend", type=click.Choice([b.value for b in Backend]), default="stub",
                 show_default=True, help="Inference backend."),
    click.option("--weights", default=None,
                 help="TorchScript module path (required for non-stub backends)."),
    click.option("--frame-sampling", type=int, default=16, show_default=True,
                 help="Frames kept per clip by uniform sub-sampling."),
    click.option("--device", default="cpu", show_default=True, help="Torch device hint."),
    click.option("--seed", type=int, default=0, show_default=True,
                 help="Stub determinism seed."),
    click.option("--stub-mode", type=click.Choice([m.value for m in StubMode]),
                 default="random", show_default=True,
                 help="Stub behaviour: seeded random scores or manifest-oracle replay."),
    click.option("--manifest", default=None,
                 help="session-manifest v1 file (required for --stub-mode oracle)."),
    click.option("--pick-width", type=int, default=6, show_default=True,
                 help="Pick frames per repetition start in oracle mode."),
]


def _with_backend_options(fn):
    for option in reversed(_backend_options):
        fn = option(fn)
    return fn


def _write_run_metadata(output_dir: Path, command: str, flags: dict) -> None:
    output_dir.mkdir(parents=True, exist_ok=True)
    meta = {"command": command, "flags": flags, "format_versions": {
        "pick-streams": 1, "clip-predictions": 1, "session-manifest": 1,
    }}
    write_text_atomic(output_dir / "run.json", json.dumps(meta, indent=2, sort_keys=True) + "\n")


@click.group()
def main():
    """Run pick/clip classifiers over videos and emit engine-format streams."""


@main.command("infer-picks")
@click.argument("videos", nargs=-1, required=True, type=click.Path(exists=True, path_type=Path))
@_with_backend_options
@click.option("-o", "--output-dir", type=click.Path(path_type=Path), default=Path("inference"),
              show_default=True, help="Directory for streams.jsonl and run.json.")
@_guarded
def infer_picks(videos, backend, weights, frame_sampling, device, seed, stub_mode,
                manifest, pick_width, output_dir: Path):
    """Emit one pick-streams v1 record per video (one probability per frame)."""
    spec = _build_spec(backend, weights, frame_sampling, device, seed, stub_mode,
                       manifest, pick_width)
    records = [infer_pick_stream(path, spec) for path in videos]
    _write_run_metadata(output_dir, "infer-picks", {
        "videos": [str(v) for v in videos], "backend": backend, "weights": weights,
        "seed": seed, "stub_mode": stub_mode, "manifest": manifest, "pick_width": pick_width,
    })
    write_text_atomic(output_dir / "streams.jsonl", pick_stream_lines(records))
    click.echo(f"wrote {len(records)} stream(s) -> {output_dir / 'streams.jsonl'}")


@main.command("infer-clips")
@click.argument("clips", nargs=-1, required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--task", type=click.Choice(["recognition", "form"]), required=True,
              help="Score-vector layout: 25-way recognition or binary form.")
@_with_backend_options
@click.option("-o", "--output-dir", type=click.Path(path_type=Path), default=Path("inference"),
              show_default=True, help="Directory for predictions.jsonl and run.json.")
@_guarded
def infer_clips(clips, task, backend, weights, frame_sampling, device, seed, stub_mode,
                manifest, pick_width, output_dir: Path):
    """Emit one clip-predictions v1 record per clip."""
    spec = _build_spec(backend, weights, frame_sampling, device, seed, stub_mode,
                       manifest, pick_width)
    records = infer_clip_predictions(list(clips), spec, task)
    _write_run_metadata(output_dir, "infer-clips", {
        "clips": [str(c) for c in clips], "task": task, "backend": backend,
        "weights": weights, "frame_sampling": frame_sampling, "seed": seed,
    })
    write_text_atomic(output_dir / "predictions.jsonl", clip_prediction_lines(records))
    click.echo(f"wrote {len(records)} prediction(s) -> {output_dir / 'predictions.jsonl'}")


if __name__ == "__main__":
    main()

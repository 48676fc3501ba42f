"""Writers for the engine's wire formats and a minimal manifest reader.

The engine consumes UTF-8 line files with a JSON header line:

    pick-streams v1      {"format": "pick-streams", "version": 1}
    clip-predictions v1  {"format": "clip-predictions", "version": 1}

Probabilities and scores are printed with 9 significant digits, the grid the
engine guarantees bit-exact round trips on. The oracle stub additionally
reads session-manifest v1 files (video records only) to locate annotated
repetition starts.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

from .errors import AdapterError


def format_value(value: float) -> str:
    return format(float(value), ".9g")


def pick_stream_lines(records: list[tuple[str, int, int, list[float]]]) -> str:
    """records: (video_id, segment_start, segment_end, probabilities)."""
    lines = ['{"format": "pick-streams", "version": 1}']
    for video_id, start, end, probs in records:
        if end - start != len(probs):
            raise AdapterError(
                f"stream {video_id!r}: {len(probs)} probabilities for segment [{start}, {end})"
            )
        payload = ", ".join(format_value(p) for p in probs)
        lines.append(
            f'{{"video_id": {json.dumps(video_id)}, "segment": [{start}, {end}], '
            f'"probs": [{payload}]}}'
        )
    return "\n".join(lines) + "\n"


def clip_prediction_lines(records: list[tuple[str, str, list[float]]]) -> str:
    """records: (clip_id, task, scores)."""
    lines = ['{"format": "clip-predictions", "version": 1}']
    for clip_id, task, scores in records:
        payload = ", ".join(format_value(s) for s in scores)
        lines.append(
            f'{{"clip_id": {json.dumps(clip_id)}, "task": "{task}", "scores": [{payload}]}}'
        )
    return "\n".join(lines) + "\n"


def write_text_atomic(path: str | Path, text: str) -> None:
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


@dataclass(frozen=True)
class AnnotatedVideo:
    video_id: str
    num_frames: int
    repetition_starts: tuple[int, ...]


def read_manifest_videos(path: str | Path) -> dict[str, AnnotatedVideo]:
    """Minimal session-manifest v1 reader: video records only."""
    text = Path(path).read_text(encoding="utf-8")
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines:
        raise AdapterError(f"empty manifest: {path}")
    header = json.loads(lines[0])
    if header.get("format") != "session-manifest" or header.get("version") != 1:
        raise AdapterError(f"not a session-manifest v1 file: {path}")
    videos = {}
    for line in lines[1:]:
        record = json.loads(line)
        if record.get("kind") != "video":
            continue
        video_id = record["video_id"]
        videos[video_id] = AnnotatedVideo(
            video_id=video_id,
            num_frames=int(record["num_frames"]),
            repetition_starts=tuple(int(pair[0]) for pair in record["repetitions"]),
        )
    return videos

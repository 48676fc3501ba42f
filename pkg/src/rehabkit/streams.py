"""Wire formats for model outputs the engine consumes.

Two line formats, both with a mandatory JSON header line:

pick-streams v1
    header: {"format": "pick-streams", "version": 1}
    record: {"video_id": str, "segment": [start, end], "probs": [p, ...]}
    One probability per frame of the segment, each in [0, 1], printed with
    9 significant digits (bit-exact round trip at that precision).

clip-predictions v1
    header: {"format": "clip-predictions", "version": 1}
    record: {"clip_id": str, "task": "recognition"|"form", "scores": [s, ...]}
    25 scores for recognition, 2 for form. Raw scores (logits or
    probabilities); only the argmax is consumed downstream.

A third format, clip-truth v1, carries the ground-truth class index per clip
for scoring: header {"format": "clip-truth", "version": 1}, records
{"clip_id": str, "class_index": int}.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass

from . import _lineio
from .errors import StreamError
from .intervals import FrameInterval

PICK_STREAM_FORMAT = ("pick-streams", 1)
CLIP_PREDICTION_FORMAT = ("clip-predictions", 1)
CLIP_TRUTH_FORMAT = ("clip-truth", 1)


class Task(enum.Enum):
    RECOGNITION = "recognition"
    FORM = "form"


#: Required score-vector length per task.
SCORE_LENGTHS = {Task.RECOGNITION: 25, Task.FORM: 2}


@dataclass(frozen=True)
class BinarySequence:
    """Immutable sequence of 0/1 values."""

    bits: tuple[int, ...]

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        for b in bits:
            if b not in (0, 1):
                raise StreamError(f"binary sequence element {b!r} is not 0 or 1")
        object.__setattr__(self, "bits", bits)

    def __len__(self) -> int:
        return len(self.bits)

    def __iter__(self):
        return iter(self.bits)

    def __getitem__(self, i):
        return self.bits[i]


@dataclass(frozen=True)
class PickStream:
    """Per-frame pick probabilities for one video segment."""

    video_id: str
    segment: FrameInterval
    probs: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "probs", tuple(float(p) for p in self.probs))
        if len(self.probs) != len(self.segment):
            raise StreamError(
                f"stream {self.video_id!r}: {len(self.probs)} probabilities for a "
                f"{len(self.segment)}-frame segment"
            )
        for i, p in enumerate(self.probs):
            if not (0.0 <= p <= 1.0):
                raise StreamError(
                    f"stream {self.video_id!r}: probability {p!r} at offset {i} outside [0, 1]"
                )

    def __len__(self) -> int:
        return len(self.probs)


@dataclass(frozen=True)
class ClipPrediction:
    """Raw class scores emitted for one clip by a recognition or form model."""

    clip_id: str
    task: Task
    scores: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "scores", tuple(float(s) for s in self.scores))
        expected = SCORE_LENGTHS[self.task]
        if len(self.scores) != expected:
            raise StreamError(
                f"clip {self.clip_id!r}: {self.task.value} prediction needs "
                f"{expected} scores, got {len(self.scores)}"
            )
        if not any(math.isfinite(s) for s in self.scores):
            raise StreamError(f"clip {self.clip_id!r}: no finite score")


def binarize(stream: PickStream, threshold: float = 0.5) -> BinarySequence:
    """Threshold a stream to bits; ties go high (p >= threshold -> 1)."""
    if not (0.0 < threshold < 1.0):
        raise StreamError(f"threshold {threshold!r} outside (0, 1)")
    return BinarySequence(tuple(1 if p >= threshold else 0 for p in stream.probs))


def parse_pick_streams(data: bytes | str) -> list[PickStream]:
    """Parse a pick-streams file, preserving record order."""
    streams = []
    for lineno, rec in _lineio.iter_records(data, *PICK_STREAM_FORMAT, error_cls=StreamError):
        video_id = _lineio.require(rec, "video_id", lineno, StreamError)
        seg = _lineio.require(rec, "segment", lineno, StreamError)
        probs = _lineio.require(rec, "probs", lineno, StreamError)
        try:
            values = tuple(_lineio.as_number(p, "probability") for p in probs)
            stream = PickStream(str(video_id), _parse_interval(seg, lineno), values)
        except StreamError as e:
            raise StreamError(f"line {lineno}: {e}") from None
        except (TypeError, ValueError) as e:
            raise StreamError(f"line {lineno}: bad record: {e}") from None
        streams.append(stream)
    return streams


def parse_clip_predictions(data: bytes | str) -> list[ClipPrediction]:
    """Parse a clip-predictions file, preserving record order."""
    predictions = []
    for lineno, rec in _lineio.iter_records(data, *CLIP_PREDICTION_FORMAT, error_cls=StreamError):
        clip_id = _lineio.require(rec, "clip_id", lineno, StreamError)
        task_name = _lineio.require(rec, "task", lineno, StreamError)
        scores = _lineio.require(rec, "scores", lineno, StreamError)
        try:
            task = Task(task_name)
        except ValueError:
            raise StreamError(f"line {lineno}: unknown task {task_name!r}") from None
        try:
            values = tuple(_lineio.as_number(s, "score") for s in scores)
            pred = ClipPrediction(str(clip_id), task, values)
        except StreamError as e:
            raise StreamError(f"line {lineno}: {e}") from None
        except (TypeError, ValueError) as e:
            raise StreamError(f"line {lineno}: bad record: {e}") from None
        predictions.append(pred)
    return predictions


def _parse_interval(value, lineno: int) -> FrameInterval:
    if not (isinstance(value, list) and len(value) == 2):
        raise StreamError(f"line {lineno}: segment must be a [start, end] pair, got {value!r}")
    try:
        return FrameInterval(
            _lineio.as_strict_int(value[0], "frame index"),
            _lineio.as_strict_int(value[1], "frame index"),
        )
    except Exception as e:
        raise StreamError(f"line {lineno}: bad segment {value!r}: {e}") from None


def parse_clip_truth(data: bytes | str) -> dict[str, int]:
    """Parse a clip-truth file into a clip_id -> class index mapping."""
    truth: dict[str, int] = {}
    for lineno, rec in _lineio.iter_records(data, *CLIP_TRUTH_FORMAT, error_cls=StreamError):
        clip_id = str(_lineio.require(rec, "clip_id", lineno, StreamError))
        if clip_id in truth:
            raise StreamError(f"line {lineno}: duplicate truth entry for clip {clip_id!r}")
        try:
            truth[clip_id] = _lineio.as_strict_int(
                _lineio.require(rec, "class_index", lineno, StreamError), "class_index"
            )
        except (TypeError, ValueError) as e:
            raise StreamError(f"line {lineno}: {e}") from None
    return truth


def serialize_clip_truth(truth: dict[str, int]) -> str:
    return _lineio.render_lines(
        _lineio.header_line(*CLIP_TRUTH_FORMAT),
        truth.items(),
        lambda item: {"clip_id": item[0], "class_index": item[1]},
    )


def serialize_pick_streams(streams: list[PickStream]) -> str:
    # Numeric payloads are assembled by hand: json.dumps would print full
    # float repr instead of the canonical 9-significant-digit form.
    lines = [_lineio.header_line(*PICK_STREAM_FORMAT)]
    for s in streams:
        probs = ", ".join(_lineio.float_repr(p) for p in s.probs)
        lines.append(
            f'{{"video_id": {json.dumps(s.video_id, ensure_ascii=False)}, '
            f'"segment": [{s.segment.start}, {s.segment.end}], '
            f'"probs": [{probs}]}}'
        )
    return "\n".join(lines) + "\n"


def serialize_clip_predictions(predictions: list[ClipPrediction]) -> str:
    lines = [_lineio.header_line(*CLIP_PREDICTION_FORMAT)]
    for p in predictions:
        scores = ", ".join(_lineio.float_repr(s) for s in p.scores)
        lines.append(
            f'{{"clip_id": {json.dumps(p.clip_id, ensure_ascii=False)}, '
            f'"task": "{p.task.value}", '
            f'"scores": [{scores}]}}'
        )
    return "\n".join(lines) + "\n"

"""Session-annotation data model plus the session-manifest v1 file format.

session-manifest v1 is UTF-8 line-structured text. The first non-blank line
is the header {"format": "session-manifest", "version": 1}; every following
line is one JSON record. Video records come first, then counting segments:

    {"kind": "video", "video_id": str, "subject_id": str,
     "exercise": "I".."XIII", "hand": "left"|"right"|"both",
     "fps": number, "num_frames": int,
     "repetitions": [[start, end], ...],
     "form_labels": [{"segment": [start, end], "verdict": str}, ...]}

    {"kind": "segment", "video_id": str, "segment": [start, end],
     "true_count": int}

All frame indices are 0-based; intervals are half-open [start, end).
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, replace
from pathlib import Path
from typing import NamedTuple

from . import _lineio
from .errors import ManifestError, ValidationError
from .intervals import FrameInterval
from .labels import ExerciseLabel, ExerciseType, Hand
from .streams import BinarySequence

MANIFEST_FORMAT = ("session-manifest", 1)

#: Annotated counts never exceed this many repetitions per segment.
MAX_SEGMENT_COUNT = 20

#: Frames marked as a pick at the start of each repetition (6 frames at 30 Hz).
DEFAULT_PICK_WIDTH = 6


class FormVerdict(enum.Enum):
    CORRECT = "correct"
    INCORRECT = "incorrect"
    #: Annotator could not judge the segment (e.g. occlusion); excluded from scoring.
    DISCARDED = "discarded"


@dataclass(frozen=True)
class FormLabel:
    segment: FrameInterval
    verdict: FormVerdict


@dataclass(frozen=True)
class VideoRecord:
    """One annotated exercise video."""

    video_id: str
    subject_id: str
    label: ExerciseLabel
    fps: float
    num_frames: int
    repetitions: tuple[FrameInterval, ...] = ()
    form_labels: tuple[FormLabel, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "repetitions", tuple(self.repetitions))
        object.__setattr__(self, "form_labels", tuple(self.form_labels))
        if not self.video_id:
            raise ManifestError("video with empty video_id")
        if not self.subject_id:
            raise ManifestError(f"video {self.video_id!r}: empty subject_id")
        if not self.fps > 0:
            raise ManifestError(f"video {self.video_id!r}: fps must be positive, got {self.fps}")
        if not (isinstance(self.num_frames, int) and self.num_frames > 0):
            raise ManifestError(
                f"video {self.video_id!r}: num_frames must be a positive integer, got {self.num_frames}"
            )
        prev = None
        for rep in self.repetitions:
            if rep.start >= rep.end:
                raise ManifestError(
                    f"video {self.video_id!r}: repetition [{rep.start}, {rep.end}): start >= end"
                )
            if rep.end > self.num_frames:
                raise ManifestError(
                    f"video {self.video_id!r}: repetition [{rep.start}, {rep.end}) exceeds "
                    f"num_frames {self.num_frames}"
                )
            if prev is not None:
                if rep.start < prev.end:
                    raise ManifestError(
                        f"video {self.video_id!r}: repetitions [{prev.start}, {prev.end}) and "
                        f"[{rep.start}, {rep.end}) overlap or are out of order"
                    )
            prev = rep
        for fl in self.form_labels:
            if fl.segment.start >= fl.segment.end:
                raise ManifestError(
                    f"video {self.video_id!r}: form segment [{fl.segment.start}, {fl.segment.end}): "
                    "start >= end"
                )
            if fl.segment.end > self.num_frames:
                raise ManifestError(
                    f"video {self.video_id!r}: form segment [{fl.segment.start}, {fl.segment.end}) "
                    f"exceeds num_frames {self.num_frames}"
                )


@dataclass(frozen=True)
class CountingSegment:
    """A sampled sub-interval with a known number of repetition starts."""

    video_id: str
    segment: FrameInterval
    true_count: int

    def __post_init__(self):
        if not (isinstance(self.true_count, int) and 1 <= self.true_count <= MAX_SEGMENT_COUNT):
            raise ManifestError(
                f"segment {self.segment_id}: true_count must be in [1, {MAX_SEGMENT_COUNT}], "
                f"got {self.true_count}"
            )
        if len(self.segment) == 0:
            raise ManifestError(f"segment {self.segment_id}: empty interval")

    @property
    def segment_id(self) -> str:
        return f"{self.video_id}:{self.segment.start}-{self.segment.end}"


@dataclass(frozen=True)
class SessionManifest:
    videos: tuple[VideoRecord, ...] = ()
    counting_segments: tuple[CountingSegment, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "videos", tuple(self.videos))
        object.__setattr__(self, "counting_segments", tuple(self.counting_segments))
        by_id = {}
        for video in self.videos:
            if video.video_id in by_id:
                raise ManifestError(f"duplicate video_id {video.video_id!r}")
            by_id[video.video_id] = video
        seen = set()
        for seg in self.counting_segments:
            video = by_id.get(seg.video_id)
            if video is None:
                raise ManifestError(f"segment {seg.segment_id}: references unknown video")
            if seg.segment.end > video.num_frames:
                raise ManifestError(
                    f"segment {seg.segment_id}: exceeds num_frames {video.num_frames}"
                )
            actual = count_repetition_starts(video, seg.segment)
            if actual != seg.true_count:
                raise ManifestError(
                    f"segment {seg.segment_id}: true_count {seg.true_count} but the video has "
                    f"{actual} repetition starts inside the segment"
                )
            key = (seg.video_id, seg.segment)
            if key in seen:
                raise ManifestError(f"segment {seg.segment_id}: duplicate segment for this video")
            seen.add(key)
        object.__setattr__(self, "_by_id", by_id)

    def video(self, video_id: str) -> VideoRecord:
        try:
            return self._by_id[video_id]
        except KeyError:
            raise ManifestError(f"unknown video_id {video_id!r}") from None

    @property
    def subject_ids(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for v in self.videos:
            seen.setdefault(v.subject_id, None)
        return tuple(seen)


def count_repetition_starts(video: VideoRecord, segment: FrameInterval) -> int:
    """Ground-truth count convention: a repetition is inside a segment iff its start frame is."""
    return sum(1 for rep in video.repetitions if segment.contains_frame(rep.start))


def derive_pick_labels(video: VideoRecord, pick_width: int = DEFAULT_PICK_WIDTH) -> BinarySequence:
    """Per-frame pick ground truth: 1 on the first `pick_width` frames of each repetition."""
    if not (isinstance(pick_width, int) and pick_width >= 1):
        raise ManifestError(f"pick_width must be a positive integer, got {pick_width!r}")
    bits = [0] * video.num_frames
    for rep in video.repetitions:
        if pick_width > len(rep):
            raise ManifestError(
                f"pick_width {pick_width} exceeds repetition [{rep.start}, {rep.end}) "
                f"of video {video.video_id!r}"
            )
        for f in range(rep.start, rep.start + pick_width):
            bits[f] = 1
    return BinarySequence(tuple(bits))


class SegmentSample(NamedTuple):
    segments: list[CountingSegment]
    #: True when fewer distinct segments exist than were requested.
    exhausted: bool


def sample_counting_segments(
    video: VideoRecord,
    n_samples: int,
    seed: int,
    max_count: int = MAX_SEGMENT_COUNT,
) -> SegmentSample:
    """Sample unique counting segments spanning 1..max_count whole repetitions.

    A candidate segment covers repetitions i..j and spans
    [repetitions[i].start, repetitions[j].end); candidates are unique as
    (i, j) pairs. If fewer candidates exist than n_samples, all of them are
    returned and the result is flagged exhausted. Deterministic per seed.
    """
    if not video.repetitions:
        raise ManifestError(f"video {video.video_id!r} has no repetitions to sample from")
    if n_samples < 1:
        raise ManifestError(f"n_samples must be positive, got {n_samples}")
    if not 1 <= max_count <= MAX_SEGMENT_COUNT:
        raise ManifestError(f"max_count must be in [1, {MAX_SEGMENT_COUNT}], got {max_count}")

    n_reps = len(video.repetitions)
    longest = min(n_reps, max_count)
    candidates = [
        (i, i + length - 1)
        for length in range(1, longest + 1)
        for i in range(n_reps - length + 1)
    ]

    if n_samples >= len(candidates):
        chosen = candidates
        exhausted = True
    else:
        chosen = random.Random(seed).sample(candidates, n_samples)
        exhausted = False

    segments = []
    for i, j in sorted(chosen):
        interval = FrameInterval(video.repetitions[i].start, video.repetitions[j].end)
        segments.append(CountingSegment(video.video_id, interval, j - i + 1))
    segments.sort(key=lambda s: (s.segment.start, s.segment.end))
    return SegmentSample(segments, exhausted)


def with_segments(manifest: SessionManifest, segments: list[CountingSegment]) -> SessionManifest:
    """Manifest with the same videos and the given counting segments."""
    return replace(manifest, counting_segments=tuple(segments))


# ---------------------------------------------------------------------------
# Parsing / serialization


def parse_manifest(data: bytes | str) -> SessionManifest:
    """Parse and fully validate a session-manifest v1 document."""
    videos: list[VideoRecord] = []
    segments: list[CountingSegment] = []
    for lineno, rec in _lineio.iter_records(data, *MANIFEST_FORMAT, error_cls=ManifestError):
        kind = _lineio.require(rec, "kind", lineno, ManifestError)
        if kind == "video":
            videos.append(_parse_video(rec, lineno))
        elif kind == "segment":
            segments.append(_parse_segment(rec, lineno))
        else:
            raise ManifestError(f"line {lineno}: unknown record kind {kind!r}")
    try:
        return SessionManifest(tuple(videos), tuple(segments))
    except ValidationError as e:
        raise ManifestError(str(e)) from None


def _parse_video(rec: dict, lineno: int) -> VideoRecord:
    video_id = str(_lineio.require(rec, "video_id", lineno, ManifestError))
    context = f"line {lineno} (video {video_id!r})"
    try:
        exercise = ExerciseType.from_roman(str(_lineio.require(rec, "exercise", lineno, ManifestError)))
        hand_name = str(_lineio.require(rec, "hand", lineno, ManifestError))
        try:
            hand = Hand(hand_name)
        except ValueError:
            raise ManifestError(f"unknown hand {hand_name!r}") from None
        label = ExerciseLabel(exercise, hand)

        reps = []
        for pair in _lineio.require(rec, "repetitions", lineno, ManifestError):
            start, end = _int_pair(pair)
            if start >= end:
                raise ManifestError(f"repetition [{start}, {end}): start >= end")
            reps.append(FrameInterval(start, end))

        form_labels = []
        for fl in rec.get("form_labels", []):
            start, end = _int_pair(_lineio.require(fl, "segment", lineno, ManifestError))
            verdict_name = str(_lineio.require(fl, "verdict", lineno, ManifestError))
            try:
                verdict = FormVerdict(verdict_name)
            except ValueError:
                raise ManifestError(f"unknown form verdict {verdict_name!r}") from None
            form_labels.append(FormLabel(FrameInterval(start, end), verdict))

        return VideoRecord(
            video_id=video_id,
            subject_id=str(_lineio.require(rec, "subject_id", lineno, ManifestError)),
            label=label,
            fps=_lineio.as_number(_lineio.require(rec, "fps", lineno, ManifestError), "fps"),
            num_frames=_lineio.as_strict_int(
                _lineio.require(rec, "num_frames", lineno, ManifestError), "num_frames"
            ),
            repetitions=tuple(reps),
            form_labels=tuple(form_labels),
        )
    except ValidationError as e:
        raise ManifestError(f"{context}: {e}") from None
    except (TypeError, ValueError) as e:
        raise ManifestError(f"{context}: bad record: {e}") from None


def _parse_segment(rec: dict, lineno: int) -> CountingSegment:
    video_id = str(_lineio.require(rec, "video_id", lineno, ManifestError))
    try:
        start, end = _int_pair(_lineio.require(rec, "segment", lineno, ManifestError))
        return CountingSegment(
            video_id=video_id,
            segment=FrameInterval(start, end),
            true_count=_lineio.as_strict_int(
                _lineio.require(rec, "true_count", lineno, ManifestError), "true_count"
            ),
        )
    except ValidationError as e:
        raise ManifestError(f"line {lineno} (segment of video {video_id!r}): {e}") from None
    except (TypeError, ValueError) as e:
        raise ManifestError(f"line {lineno} (segment of video {video_id!r}): bad record: {e}") from None


def _int_pair(pair) -> tuple[int, int]:
    if not (isinstance(pair, (list, tuple)) and len(pair) == 2):
        raise ValueError(f"expected a [start, end] pair, got {pair!r}")
    return (
        _lineio.as_strict_int(pair[0], "frame index"),
        _lineio.as_strict_int(pair[1], "frame index"),
    )


def serialize_manifest(manifest: SessionManifest) -> str:
    records = []
    for v in manifest.videos:
        records.append(
            {
                "kind": "video",
                "video_id": v.video_id,
                "subject_id": v.subject_id,
                "exercise": v.label.exercise_type.roman,
                "hand": v.label.hand.value,
                "fps": v.fps,
                "num_frames": v.num_frames,
                "repetitions": [r.as_pair() for r in v.repetitions],
                "form_labels": [
                    {"segment": fl.segment.as_pair(), "verdict": fl.verdict.value}
                    for fl in v.form_labels
                ],
            }
        )
    for s in manifest.counting_segments:
        records.append(
            {
                "kind": "segment",
                "video_id": s.video_id,
                "segment": s.segment.as_pair(),
                "true_count": s.true_count,
            }
        )
    return _lineio.render_lines(_lineio.header_line(*MANIFEST_FORMAT), records)


def load_manifest(path: str | Path) -> SessionManifest:
    return parse_manifest(Path(path).read_bytes())


def save_manifest(manifest: SessionManifest, path: str | Path) -> None:
    _lineio.write_text_atomic(path, serialize_manifest(manifest))

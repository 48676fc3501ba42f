"""Seeded generators for ground-truthed pick streams and noisy variants.

Clean streams carry probability 1.0 on pick frames and 0.0 elsewhere, so they
count exactly under any admissible filter config. The noise model decomposes
classifier error into three independently seeded components: per-frame label
flips, injected 1-spikes, and erased frames inside picks. A flip-only model
with flip_prob = 1 - a reproduces an a-accurate per-frame classifier, which is
how corpora are calibrated to a published operating point.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .intervals import FrameInterval
from .labels import ALL_LABELS, ExerciseLabel, ExerciseType, Hand
from .manifest import (
    CountingSegment,
    DEFAULT_PICK_WIDTH,
    FormLabel,
    FormVerdict,
    SessionManifest,
    VideoRecord,
    derive_pick_labels,
)
from .repcount import FilterConfig, count_repetitions
from .streams import PickStream


@dataclass(frozen=True)
class NoiseModel:
    """Independently seeded corruption components for clean pick streams."""

    flip_prob: float = 0.0
    spike_rate: float = 0.0  # expected injected 1-spikes per 100 frames
    dropout_rate: float = 0.0  # expected erased pick-frames per pick
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.flip_prob <= 1.0:
            raise ValidationError(f"flip_prob {self.flip_prob} outside [0, 1]")
        if self.spike_rate < 0 or self.dropout_rate < 0:
            raise ValidationError("spike_rate and dropout_rate must be non-negative")

    @classmethod
    def for_frame_accuracy(cls, accuracy: float, seed: int = 0) -> "NoiseModel":
        """Flip-only model whose post-binarization frame accuracy converges to `accuracy`."""
        if not 0.0 <= accuracy <= 1.0:
            raise ValidationError(f"accuracy {accuracy} outside [0, 1]")
        return cls(flip_prob=1.0 - accuracy, seed=seed)

    def reseeded(self, seed: int) -> "NoiseModel":
        return NoiseModel(self.flip_prob, self.spike_rate, self.dropout_rate, seed)


def gen_session(
    n_reps: int,
    rep_len_frames: int,
    gap_frames: int,
    pick_width: int = DEFAULT_PICK_WIDTH,
    seed: int = 0,
    *,
    video_id: str | None = None,
    subject_id: str = "S-I",
    label: ExerciseLabel = ExerciseLabel(ExerciseType.TOWEL_HAND_CLOSING, Hand.LEFT),
    fps: float = 30.0,
) -> tuple[VideoRecord, PickStream]:
    """Deterministic clean session: n_reps equal repetitions and its pick stream.

    Repetition k spans [k*(rep_len+gap), k*(rep_len+gap)+rep_len). The stream
    covers the whole video with probability 1.0 exactly on pick frames.
    """
    if not 1 <= n_reps <= 20:
        raise ValidationError(f"n_reps {n_reps} outside [1, 20]")
    if rep_len_frames < 1 or gap_frames < 0:
        raise ValidationError("rep_len_frames must be >= 1 and gap_frames >= 0")
    if not 1 <= pick_width <= rep_len_frames:
        raise ValidationError(
            f"pick_width {pick_width} must be in [1, rep_len_frames={rep_len_frames}]"
        )

    stride = rep_len_frames + gap_frames
    reps = tuple(
        FrameInterval(k * stride, k * stride + rep_len_frames) for k in range(n_reps)
    )
    num_frames = (n_reps - 1) * stride + rep_len_frames
    video = VideoRecord(
        video_id=video_id if video_id is not None else f"synth-{seed:08x}",
        subject_id=subject_id,
        label=label,
        fps=fps,
        num_frames=num_frames,
        repetitions=reps,
    )
    bits = derive_pick_labels(video, pick_width)
    stream = PickStream(video.video_id, FrameInterval(0, num_frames), tuple(float(b) for b in bits))
    return video, stream


def corrupt(stream: PickStream, model: NoiseModel, threshold: float = 0.5) -> PickStream:
    """Perturb a stream per the noise model; same length, values stay in [0, 1].

    Component edits are computed against the original stream (flip and spike
    selections never depend on each other's draws) and applied in the order
    flips, spikes, dropout.
    """
    probs = np.asarray(stream.probs, dtype=np.float64)
    n = len(probs)
    if n == 0:
        return stream
    labels = probs >= threshold
    out = probs.copy()

    # Replacement values keep a 2% margin from the threshold so the
    # 9-significant-digit file format can never round a label across it.
    def low(draws):
        return draws * (threshold * 0.98)

    def high(draws):
        return threshold + (1.0 - threshold) * (0.02 + 0.98 * draws)

    if model.flip_prob > 0:
        rng = np.random.default_rng([model.seed, 0])
        flip = rng.random(n) < model.flip_prob
        draws = rng.random(n)
        out[flip & labels] = low(draws[flip & labels])
        out[flip & ~labels] = high(draws[flip & ~labels])

    if model.spike_rate > 0:
        rng = np.random.default_rng([model.seed, 1])
        k = rng.binomial(n, min(1.0, model.spike_rate / 100.0))
        if k:
            positions = rng.choice(n, size=k, replace=False)
            out[positions] = high(rng.random(k))

    if model.dropout_rate > 0:
        rng = np.random.default_rng([model.seed, 2])
        for start, length in _one_runs(labels):
            whole = int(model.dropout_rate)
            k = min(length, whole + int(rng.random() < model.dropout_rate - whole))
            if k:
                positions = start + rng.choice(length, size=k, replace=False)
                out[positions] = low(rng.random(k))

    return PickStream(stream.video_id, stream.segment, tuple(out.tolist()))


def _one_runs(labels: np.ndarray) -> list[tuple[int, int]]:
    """(start, length) of maximal True runs."""
    runs = []
    i = 0
    n = len(labels)
    while i < n:
        if labels[i]:
            j = i
            while j < n and labels[j]:
                j += 1
            runs.append((i, j - i))
            i = j
        else:
            i += 1
    return runs


#: The thirteen filter configurations of the published ablation, row I (no
#: filtering) through row XIII, in table order.
TABLE6_CONFIGS: tuple[FilterConfig, ...] = tuple(
    FilterConfig(fil1, fil0)
    for fil1, fil0 in [
        (0, 0),
        (1, 0), (2, 0), (3, 0), (4, 0), (5, 0), (6, 0),
        (5, 1), (5, 2), (5, 3), (5, 4), (5, 5), (5, 6),
    ]
)


@dataclass(frozen=True)
class AblationRow:
    config: FilterConfig
    mae: float


def ablation_sweep(
    corpus: list[tuple[PickStream, int]],
    configs: list[FilterConfig],
    threshold: float = 0.5,
) -> list[AblationRow]:
    """MAE of the counting pipeline per filter config, rows in the given order."""
    if not corpus:
        raise ValidationError("ablation sweep needs a non-empty corpus")
    rows = []
    for config in configs:
        total = sum(
            abs(count_repetitions(stream, threshold, config).count - true_count)
            for stream, true_count in corpus
        )
        rows.append(AblationRow(config, total / len(corpus)))
    return rows


@dataclass(frozen=True)
class Corpus:
    manifest: SessionManifest
    streams: tuple[PickStream, ...]

    def counting_pairs(self) -> list[tuple[PickStream, int]]:
        """(stream, true_count) over the full-span counting segments."""
        truth = {seg.segment_id: seg.true_count for seg in self.manifest.counting_segments}
        return [
            (s, truth[f"{s.video_id}:{s.segment.start}-{s.segment.end}"]) for s in self.streams
        ]


def _roman(n: int) -> str:
    out = []
    for value, sym in ((1000, "M"), (900, "CM"), (500, "D"), (400, "CD"), (100, "C"),
                       (90, "XC"), (50, "L"), (40, "XL"), (10, "X"), (9, "IX"),
                       (5, "V"), (4, "IV"), (1, "I")):
        while n >= value:
            out.append(sym)
            n -= value
    return "".join(out)


def gen_corpus(
    n_videos: int,
    seed: int,
    *,
    n_subjects: int = 9,
    rep_len_range: tuple[int, int] = (6, 40),
    gap_range: tuple[int, int] = (4, 12),
    pick_width: int = DEFAULT_PICK_WIDTH,
    noise: NoiseModel | None = None,
    fps: float = 30.0,
) -> Corpus:
    """Seeded corpus of labelled sessions with one full-span counting segment each.

    Subjects S-I..S-<n> are assigned round-robin so every subject is covered.
    Geometry draws are independent of the noise model: the same seed yields
    the same manifest whether or not noise is applied to the streams.
    """
    if n_videos < 1:
        raise ValidationError("n_videos must be positive")
    if rep_len_range[0] < pick_width:
        raise ValidationError(
            f"rep_len_range lower bound {rep_len_range[0]} below pick_width {pick_width}"
        )
    if gap_range[0] < 0:
        raise ValidationError("gap_range lower bound must be >= 0")

    rng = random.Random(seed)
    subjects = [f"S-{_roman(i + 1)}" for i in range(n_subjects)]

    videos = []
    streams = []
    segments = []
    for i in range(n_videos):
        n_reps = rng.randint(1, 20)
        rep_len = rng.randint(*rep_len_range)
        gap = rng.randint(*gap_range)
        label = rng.choice(ALL_LABELS)
        video, stream = gen_session(
            n_reps,
            rep_len,
            gap,
            pick_width,
            seed,
            video_id=f"synth-{seed:08x}-{i:05d}",
            subject_id=subjects[i % n_subjects],
            label=label,
            fps=fps,
        )
        video = _with_form_labels(video, rng)
        if noise is not None:
            stream = corrupt(stream, noise.reseeded(noise.seed + i))
        videos.append(video)
        streams.append(stream)
        segments.append(
            CountingSegment(video.video_id, FrameInterval(0, video.num_frames), n_reps)
        )

    return Corpus(SessionManifest(tuple(videos), tuple(segments)), tuple(streams))


def _with_form_labels(video: VideoRecord, rng: random.Random) -> VideoRecord:
    """Attach 10-second form judgements tiling the video."""
    chunk = int(round(10 * video.fps))
    form = []
    for start in range(0, video.num_frames, chunk):
        end = min(start + chunk, video.num_frames)
        if end > start:
            verdict = rng.choice((FormVerdict.CORRECT, FormVerdict.INCORRECT, FormVerdict.DISCARDED))
            form.append(FormLabel(FrameInterval(start, end), verdict))
    return VideoRecord(
        video.video_id,
        video.subject_id,
        video.label,
        video.fps,
        video.num_frames,
        video.repetitions,
        tuple(form),
    )

"""Metrics and split protocols.

Counting quality is reported as MAE plus the share of samples at absolute
error 0, 1, 2 and >2, overall and per exercise type (left/right hands of the
same exercise are pooled). Classification quality is top-1 accuracy with a
full confusion matrix. Splits are either stratified train/val/test at
configurable fractions or leave-one-subject-out with the remaining videos
split 90/10 between train and validation.
"""

from __future__ import annotations

import enum
import math
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from . import _lineio
from .errors import EvaluationError, ValidationError
from .labels import ExerciseLabel, ExerciseType, exercise_type_of, label_index
from .manifest import CountingSegment, SessionManifest
from .streams import SCORE_LENGTHS, ClipPrediction, Task

LOOCV_VAL_SHARE = 0.1


class SplitMode(enum.Enum):
    EQUAL_DISTRIBUTION = "equal"
    LOOCV = "loocv"


@dataclass(frozen=True)
class SplitSpec:
    mode: SplitMode
    seed: int = 0
    test_subject: Optional[str] = None
    train_fraction: float = 0.8
    val_fraction: float = 0.1

    def __post_init__(self):
        if self.mode is SplitMode.LOOCV:
            if not self.test_subject:
                raise ValidationError("loocv split requires test_subject")
        else:
            if self.train_fraction <= 0 or self.val_fraction <= 0:
                raise ValidationError("train and val fractions must be positive")
            if self.test_fraction <= 1e-12:
                raise ValidationError(
                    f"train_fraction + val_fraction = "
                    f"{self.train_fraction + self.val_fraction} leaves no test share"
                )

    @property
    def test_fraction(self) -> float:
        return 1.0 - self.train_fraction - self.val_fraction


@dataclass(frozen=True)
class Split:
    train: tuple[str, ...]
    val: tuple[str, ...]
    test: tuple[str, ...]
    warnings: tuple[str, ...] = ()


def _round_half_up(x: float) -> int:
    return math.floor(x + 0.5)


def _largest_remainder(n: int, fractions: Sequence[float]) -> list[int]:
    """Integer allocation of n items to parts. Ties break toward earlier parts."""
    ideal = [n * f for f in fractions]
    counts = [math.floor(v) for v in ideal]
    order = sorted(range(len(fractions)), key=lambda i: (-(ideal[i] - counts[i]), i))
    k = 0
    while sum(counts) < n:
        counts[order[k % len(order)]] += 1
        k += 1
    return counts


def _group_by_label(video_ids: Iterable[str], manifest: SessionManifest) -> list[tuple[ExerciseLabel, list[str]]]:
    groups: dict[ExerciseLabel, list[str]] = {}
    for vid in video_ids:
        groups.setdefault(manifest.video(vid).label, []).append(vid)
    ordered = sorted(groups.items(), key=lambda item: label_index(item[0]))
    for _, members in ordered:
        members.sort()
    return ordered


def make_splits(manifest: SessionManifest, spec: SplitSpec) -> Split:
    """Disjoint train/val/test video-id sets covering the manifest. Deterministic per seed."""
    if spec.mode is SplitMode.LOOCV:
        return _loocv_split(manifest, spec)
    return _equal_split(manifest, spec)


def _loocv_split(manifest: SessionManifest, spec: SplitSpec) -> Split:
    if spec.test_subject not in manifest.subject_ids:
        raise EvaluationError(f"unknown subject {spec.test_subject!r}")
    test = [v.video_id for v in manifest.videos if v.subject_id == spec.test_subject]
    remaining = [v.video_id for v in manifest.videos if v.subject_id != spec.test_subject]

    groups = _group_by_label(remaining, manifest)
    # Global validation quota: 10% of the remaining videos, rounded half up.
    n_val_target = _round_half_up(LOOCV_VAL_SHARE * len(remaining))

    # Per-class quotas by largest remainder so they sum to the global target.
    ideals = [LOOCV_VAL_SHARE * len(members) for _, members in groups]
    quotas = [math.floor(v) for v in ideals]
    order = sorted(range(len(groups)), key=lambda i: (-(ideals[i] - quotas[i]), i))
    k = 0
    while sum(quotas) < n_val_target and order:
        idx = order[k % len(order)]
        if quotas[idx] < len(groups[idx][1]):
            quotas[idx] += 1
        k += 1

    warnings = []
    rng = random.Random(spec.seed)
    train: list[str] = []
    val: list[str] = []
    for (label, members), quota in zip(groups, quotas):
        if len(members) < 2:
            warnings.append(
                f"class {label} has {len(members)} video(s) among non-test subjects; "
                "cannot stratify train/val, assigning best-effort"
            )
        shuffled = members[:]
        rng.shuffle(shuffled)
        val.extend(shuffled[:quota])
        train.extend(shuffled[quota:])

    return Split(tuple(sorted(train)), tuple(sorted(val)), tuple(sorted(test)), tuple(warnings))


def _equal_split(manifest: SessionManifest, spec: SplitSpec) -> Split:
    groups = _group_by_label((v.video_id for v in manifest.videos), manifest)
    fractions = (spec.train_fraction, spec.val_fraction, spec.test_fraction)

    warnings = []
    rng = random.Random(spec.seed)
    parts: tuple[list[str], list[str], list[str]] = ([], [], [])
    for label, members in groups:
        if len(members) < 3:
            warnings.append(
                f"class {label} has {len(members)} video(s); cannot stratify across "
                "train/val/test, assigning best-effort"
            )
        counts = _largest_remainder(len(members), fractions)
        shuffled = members[:]
        rng.shuffle(shuffled)
        start = 0
        for part, count in zip(parts, counts):
            part.extend(shuffled[start:start + count])
            start += count

    train, val, test = parts
    return Split(tuple(sorted(train)), tuple(sorted(val)), tuple(sorted(test)), tuple(warnings))


def write_split(split: Split, directory: str | Path) -> list[Path]:
    """Write train.txt / val.txt / test.txt (one video_id per line)."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name, ids in (("train", split.train), ("val", split.val), ("test", split.test)):
        path = directory / f"{name}.txt"
        _lineio.write_text_atomic(path, "".join(f"{vid}\n" for vid in ids))
        written.append(path)
    return written


# ---------------------------------------------------------------------------
# Classification metrics


@dataclass(frozen=True, eq=False)
class ClassificationReport:
    task: Task
    top1_accuracy: float
    confusion: np.ndarray  # confusion[true][pred]
    support: np.ndarray

    def __post_init__(self):
        if not np.array_equal(self.confusion.sum(axis=1), self.support):
            raise ValidationError("confusion row sums do not match per-class support")
        total = int(self.support.sum())
        expected = 100.0 * np.trace(self.confusion) / total if total else 0.0
        if abs(expected - self.top1_accuracy) > 1e-9:
            raise ValidationError("top1_accuracy does not equal trace/total")

    @property
    def total(self) -> int:
        return int(self.support.sum())

    def to_dict(self) -> dict:
        return {
            "task": self.task.value,
            "top1_accuracy": self.top1_accuracy,
            "total": self.total,
            "support": self.support.tolist(),
            "confusion": self.confusion.tolist(),
        }


def _argmax(scores: Sequence[float]) -> int:
    """Index of the largest finite score; ties go to the lowest index."""
    best = None
    best_score = None
    for i, s in enumerate(scores):
        if math.isfinite(s) and (best is None or s > best_score):
            best, best_score = i, s
    assert best is not None  # ClipPrediction guarantees a finite score
    return best


def top1(
    predictions: Sequence[ClipPrediction],
    truth: Mapping[str, int],
    task: Task | None = None,
) -> ClassificationReport:
    """Top-1 accuracy and confusion matrix against integer class labels."""
    if task is None:
        if not predictions:
            raise EvaluationError("cannot infer task from an empty prediction list")
        task = predictions[0].task
    n_classes = SCORE_LENGTHS[task]
    confusion = np.zeros((n_classes, n_classes), dtype=np.int64)
    for pred in predictions:
        if pred.task is not task:
            raise EvaluationError(f"clip {pred.clip_id!r}: task {pred.task.value} in a {task.value} evaluation")
        if pred.clip_id not in truth:
            raise EvaluationError(f"no truth entry for clip {pred.clip_id!r}")
        true_class = truth[pred.clip_id]
        if not 0 <= true_class < n_classes:
            raise EvaluationError(
                f"clip {pred.clip_id!r}: truth class {true_class} outside [0, {n_classes})"
            )
        confusion[true_class][_argmax(pred.scores)] += 1
    total = len(predictions)
    accuracy = 100.0 * np.trace(confusion) / total if total else 0.0
    return ClassificationReport(task, float(accuracy), confusion, confusion.sum(axis=1))


def argmax_invariance_check(predictions: Sequence[ClipPrediction], scale: float = 2.0) -> bool:
    """True iff scaling every score vector by `scale` leaves all argmaxes unchanged.

    Trivially true for any positive scale; kept as a regression guard for the
    score-scale independence of the evaluation path.
    """
    if scale <= 0:
        raise ValidationError(f"scale must be positive, got {scale}")
    return all(
        _argmax(p.scores) == _argmax([s * scale for s in p.scores]) for p in predictions
    )


# ---------------------------------------------------------------------------
# Counting metrics


@dataclass(frozen=True)
class CountingStats:
    """MAE plus |e|-bucket percentages for one group of samples."""

    mae: float
    bucket_e0: float
    bucket_e1: float
    bucket_e2: float
    bucket_egt2: float
    n_samples: int

    def __post_init__(self):
        if self.mae < 0:
            raise ValidationError(f"mae must be non-negative, got {self.mae}")
        if self.n_samples:
            total = self.bucket_e0 + self.bucket_e1 + self.bucket_e2 + self.bucket_egt2
            if abs(total - 100.0) > 1e-6:
                raise ValidationError(f"bucket percentages sum to {total}, expected 100")

    def to_dict(self) -> dict:
        return {
            "mae": self.mae,
            "bucket_e0": self.bucket_e0,
            "bucket_e1": self.bucket_e1,
            "bucket_e2": self.bucket_e2,
            "bucket_egt2": self.bucket_egt2,
            "n_samples": self.n_samples,
        }


@dataclass(frozen=True)
class CountingReport(CountingStats):
    per_exercise: dict[ExerciseType, CountingStats] = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = super().to_dict()
        d["per_exercise"] = {t.roman: s.to_dict() for t, s in self.per_exercise.items()}
        return d


def _bucket_stats(errors: Sequence[int]) -> CountingStats:
    n = len(errors)
    if n == 0:
        return CountingStats(0.0, 0.0, 0.0, 0.0, 0.0, 0)
    counts = [0, 0, 0, 0]
    for e in errors:
        counts[min(e, 3)] += 1
    pct = [100.0 * c / n for c in counts]
    return CountingStats(sum(errors) / n, pct[0], pct[1], pct[2], pct[3], n)


def counting_report(
    pred_counts: Mapping[str, int],
    segments: Sequence[CountingSegment],
    manifest: SessionManifest,
) -> CountingReport:
    """Score predicted counts (keyed by segment_id) against segment ground truth."""
    errors: list[int] = []
    per_type: dict[ExerciseType, list[int]] = {}
    for seg in segments:
        if seg.segment_id not in pred_counts:
            raise EvaluationError(f"no predicted count for segment {seg.segment_id}")
        error = abs(int(pred_counts[seg.segment_id]) - seg.true_count)
        errors.append(error)
        ex_type = exercise_type_of(manifest.video(seg.video_id).label)
        per_type.setdefault(ex_type, []).append(error)

    overall = _bucket_stats(errors)
    per_exercise = {
        ex_type: _bucket_stats(per_type[ex_type])
        for ex_type in sorted(per_type, key=lambda t: t.value)
    }
    return CountingReport(
        overall.mae,
        overall.bucket_e0,
        overall.bucket_e1,
        overall.bucket_e2,
        overall.bucket_egt2,
        overall.n_samples,
        per_exercise,
    )


# ---------------------------------------------------------------------------
# Table rendering

COUNTING_TABLE_COLUMNS = ("MAE", "|e| = 0 [%]", "|e| = 1 [%]", "|e| = 2 [%]", "|e| > 2 [%]")
CLASSIFICATION_TABLE_COLUMNS = ("Val. [%]", "Test [%]")


def _format_table(header: list[str], rows: list[list[str]]) -> str:
    widths = [max(len(header[i]), *(len(r[i]) for r in rows)) if rows else len(header[i])
              for i in range(len(header))]
    lines = []
    lines.append("  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip())
    lines.append("  ".join("-" * w for w in widths))
    for row in rows:
        lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
    return "\n".join(lines) + "\n"


def _stats_cells(stats: CountingStats) -> list[str]:
    return [
        f"{stats.mae:.2f}",
        f"{stats.bucket_e0:.1f}",
        f"{stats.bucket_e1:.1f}",
        f"{stats.bucket_e2:.1f}",
        f"{stats.bucket_egt2:.1f}",
    ]


def render_counting_table(report: CountingReport) -> str:
    """Human-readable per-exercise counting table, one row per exercise type plus Overall."""
    header = ["Exercise type", *COUNTING_TABLE_COLUMNS]
    rows = []
    for ex_type, stats in report.per_exercise.items():
        rows.append([f"{ex_type.roman} - {ex_type.display_name}", *_stats_cells(stats)])
    rows.append(["Overall", *_stats_cells(report)])
    return _format_table(header, rows)


def render_classification_table(rows: Sequence[tuple[str, float | None, float | None]]) -> str:
    """Method / Val. [%] / Test [%] accuracy table. None renders as '-'."""
    header = ["Method", *CLASSIFICATION_TABLE_COLUMNS]
    fmt = lambda v: "-" if v is None else f"{v:.2f}"
    body = [[name, fmt(val), fmt(test)] for name, val, test in rows]
    return _format_table(header, body)


def render_loocv_table(
    rows: Sequence[tuple[str, Mapping[str, float]]], subjects: Sequence[str]
) -> str:
    """Per-subject metric table: one column per test subject, one row per method."""
    header = ["Method", *subjects]
    body = []
    for name, values in rows:
        body.append([name, *(f"{values[s]:.2f}" if s in values else "-" for s in subjects)])
    return _format_table(header, body)

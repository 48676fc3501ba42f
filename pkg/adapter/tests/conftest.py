import cv2
import numpy as np
import pytest

from rehabkit import (
    CountingSegment,
    ExerciseLabel,
    ExerciseType,
    FrameInterval,
    Hand,
    SessionManifest,
    VideoRecord,
    save_manifest,
)


def write_toy_clip(path, n_frames, size=32, seed=0):
    rng = np.random.default_rng(seed)
    writer = cv2.VideoWriter(
        str(path), cv2.VideoWriter_fourcc(*"MJPG"), 30.0, (size, size)
    )
    assert writer.isOpened()
    for _ in range(n_frames):
        writer.write(rng.integers(0, 255, size=(size, size, 3), dtype=np.uint8))
    writer.release()
    return path


class ToySession:
    def __init__(self, root):
        self.root = root
        self.clip_dir = root / "clips"
        self.clip_dir.mkdir()
        rep_len = 12
        labels = [
            ExerciseLabel(ExerciseType.TOWEL_HAND_CLOSING, Hand.LEFT),
            ExerciseLabel(ExerciseType.WRIST_CURL, Hand.RIGHT),
            ExerciseLabel(ExerciseType.PUSHING_HANDS, Hand.BOTH),
        ]
        videos = []
        segments = []
        self.clips = []
        for i, n_reps in enumerate((3, 4, 5)):
            video_id = f"toy-{i}"
            num_frames = n_reps * rep_len
            reps = tuple(
                FrameInterval(k * rep_len, (k + 1) * rep_len) for k in range(n_reps)
            )
            videos.append(
                VideoRecord(
                    video_id=video_id,
                    subject_id=f"S-{i + 1}",
                    label=labels[i],
                    fps=30.0,
                    num_frames=num_frames,
                    repetitions=reps,
                )
            )
            segments.append(
                CountingSegment(video_id, FrameInterval(0, num_frames), n_reps)
            )
            self.clips.append(
                write_toy_clip(self.clip_dir / f"{video_id}.avi", num_frames, seed=i)
            )
        self.manifest = SessionManifest(tuple(videos), tuple(segments))
        self.manifest_path = root / "manifest.jsonl"
        save_manifest(self.manifest, self.manifest_path)


@pytest.fixture(scope="session")
def toy_session(tmp_path_factory):
    return ToySession(tmp_path_factory.mktemp("toy-session"))

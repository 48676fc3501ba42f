"""Video decoding via OpenCV."""

from __future__ import annotations

from pathlib import Path

import cv2
import numpy as np

from .errors import VideoReadError


def read_frames(video_path: str | Path) -> list[np.ndarray]:
    """Decode all frames as RGB uint8 arrays."""
    path = Path(video_path)
    if not path.exists():
        raise VideoReadError(f"video file not found: {path}")
    capture = cv2.VideoCapture(str(path))
    if not capture.isOpened():
        raise VideoReadError(f"cannot open video: {path}")
    frames = []
    try:
        while True:
            ok, frame = capture.read()
            if not ok:
                break
            frames.append(cv2.cvtColor(frame, cv2.COLOR_BGR2RGB))
    finally:
        capture.release()
    if not frames:
        raise VideoReadError(f"video has no decodable frames: {path}")
    return frames


def count_frames(video_path: str | Path) -> int:
    # CAP_PROP_FRAME_COUNT is unreliable for some containers; decode to count.
    return len(read_frames(video_path))


def uniform_subsample(frames: list[np.ndarray], count: int) -> list[np.ndarray]:
    """Keep `count` frames spread evenly over the clip (with repetition if short)."""
    if count < 1:
        raise VideoReadError(f"subsample count must be >= 1, got {count}")
    indices = np.linspace(0, len(frames) - 1, num=count).round().astype(int)
    return [frames[i] for i in indices]

"""Inference backends: a deterministic stub and TorchScript-backed classifiers.

Real models are always loaded, never rebuilt here: export the trained
per-frame pick classifier or clip classifier with torch.jit.script/trace and
point weights_path at the artifact. The stub needs no weights and exists so
integration runs end to end without any model download; its oracle mode
replays manifest annotations as perfect pick probabilities.
"""

from __future__ import annotations

import hashlib
from pathlib import Path

import numpy as np

from .errors import BackendError, VideoReadError
from .formats import read_manifest_videos
from .spec import Backend, BackendSpec, StubMode
from .video import read_frames, uniform_subsample

TASK_SCORE_LENGTHS = {"recognition": 25, "form": 2}


def _stable_rng(seed: int, *names: str) -> np.random.Generator:
    """Process-independent RNG keyed on the seed and string identifiers."""
    digest = hashlib.sha256(("\x1f".join(names)).encode("utf-8")).digest()
    words = [int.from_bytes(digest[i:i + 4], "big") for i in range(0, 16, 4)]
    return np.random.default_rng([seed, *words])


def infer_pick_stream(video_path: str | Path, spec: BackendSpec) -> tuple[str, int, int, list[float]]:
    """One pick probability per frame; returns (video_id, start, end, probs)."""
    video_path = Path(video_path)
    video_id = video_path.stem
    if spec.backend is Backend.STUB:
        probs = _stub_pick_probs(video_id, video_path, spec)
    elif spec.backend is Backend.PICK_CLASSIFIER:
        probs = _torchscript_pick_probs(video_path, spec)
    else:
        raise BackendError(
            f"backend {spec.backend.value} cannot produce per-frame pick streams"
        )
    return video_id, 0, len(probs), probs


def _stub_pick_probs(video_id: str, video_path: Path, spec: BackendSpec) -> list[float]:
    n_frames = len(read_frames(video_path))
    if spec.stub_mode is StubMode.RANDOM:
        rng = _stable_rng(spec.seed, "pick", video_id)
        # mostly-low probabilities with occasional high frames
        return [round(float(p), 6) for p in rng.beta(0.7, 2.0, size=n_frames)]
    videos = read_manifest_videos(spec.manifest_path)
    if video_id not in videos:
        raise BackendError(f"manifest has no video {video_id!r} for oracle mode")
    annotated = videos[video_id]
    if annotated.num_frames != n_frames:
        raise VideoReadError(
            f"video {video_id!r} has {n_frames} frames but the manifest says "
            f"{annotated.num_frames}"
        )
    probs = [0.0] * n_frames
    for start in annotated.repetition_starts:
        for f in range(start, min(start + spec.pick_width, n_frames)):
            probs[f] = 1.0
    return probs


def infer_clip_predictions(
    clip_paths: list[str | Path], spec: BackendSpec, task: str
) -> list[tuple[str, str, list[float]]]:
    """Clip-level class scores; returns (clip_id, task, scores) records."""
    if task not in TASK_SCORE_LENGTHS:
        raise BackendError(f"unknown task {task!r} (expected recognition or form)")
    records = []
    for path in clip_paths:
        path = Path(path)
        clip_id = path.stem
        if spec.backend is Backend.STUB:
            rng = _stable_rng(spec.seed, "clip", task, clip_id)
            scores = [round(float(s), 6) for s in rng.random(TASK_SCORE_LENGTHS[task])]
        elif spec.backend is Backend.CLIP_CLASSIFIER:
            scores = _torchscript_clip_scores(path, spec, task)
        else:
            raise BackendError(
                f"backend {spec.backend.value} cannot produce clip predictions"
            )
        records.append((clip_id, task, scores))
    return records


# --- TorchScript backends ---------------------------------------------------


def _load_torchscript(spec: BackendSpec):
    try:
        import torch
    except ImportError:
        raise BackendError(
            "torch is required for non-stub backends (pip install rehabkit-adapter[torch])"
        ) from None
    weights = Path(spec.weights_path)
    if not weights.exists():
        raise BackendError(f"weights file not found: {weights}")
    try:
        module = torch.jit.load(str(weights), map_location=spec.device)
    except Exception as e:
        raise BackendError(f"cannot load TorchScript module {weights}: {e}") from None
    module.eval()
    return torch, module


def _frames_to_tensor(torch, frames, device: str):
    stacked = np.stack(frames).astype(np.float32) / 255.0  # (N, H, W, C)
    tensor = torch.from_numpy(stacked).permute(0, 3, 1, 2)  # (N, C, H, W)
    return tensor.to(device)


def _torchscript_pick_probs(video_path: Path, spec: BackendSpec) -> list[float]:
    torch, module = _load_torchscript(spec)
    frames = read_frames(video_path)
    with torch.no_grad():
        output = module(_frames_to_tensor(torch, frames, spec.device))
    if output.ndim == 2 and output.shape[1] == 2:
        probs = torch.softmax(output, dim=1)[:, 1]
    elif output.ndim == 2 and output.shape[1] == 1:
        probs = torch.sigmoid(output[:, 0])
    elif output.ndim == 1:
        probs = torch.sigmoid(output)
    else:
        raise BackendError(
            f"pick classifier must emit (N,), (N,1) or (N,2) scores, got {tuple(output.shape)}"
        )
    if probs.shape[0] != len(frames):
        raise BackendError(
            f"pick classifier emitted {probs.shape[0]} probabilities for {len(frames)} frames"
        )
    return [float(p) for p in probs.cpu()]


def _torchscript_clip_scores(clip_path: Path, spec: BackendSpec, task: str) -> list[float]:
    torch, module = _load_torchscript(spec)
    frames = uniform_subsample(read_frames(clip_path), spec.frame_sampling)
    with torch.no_grad():
        output = module(_frames_to_tensor(torch, frames, spec.device))
    scores = output.reshape(-1)
    expected = TASK_SCORE_LENGTHS[task]
    if scores.shape[0] != expected:
        raise BackendError(
            f"clip classifier emitted {scores.shape[0]} scores; task {task} needs {expected}"
        )
    return [float(s) for s in scores.cpu()]

"""Backend configuration for inference runs."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .errors import BackendError


class Backend(enum.Enum):
    STUB = "stub"
    PICK_CLASSIFIER = "pick_classifier"
    CLIP_CLASSIFIER = "clip_classifier"


class StubMode(enum.Enum):
    RANDOM = "random"
    #: Emit probability 1.0 exactly on annotated pick frames (needs a manifest).
    ORACLE = "oracle"


@dataclass(frozen=True)
class BackendSpec:
    backend: Backend = Backend.STUB
    weights_path: Optional[Path] = None
    #: Frames kept per clip by uniform sub-sampling (clip backends).
    frame_sampling: int = 16
    device: str = "cpu"
    seed: int = 0
    stub_mode: StubMode = StubMode.RANDOM
    #: session-manifest v1 file backing the stub's oracle mode.
    manifest_path: Optional[Path] = None
    pick_width: int = 6

    def __post_init__(self):
        if self.backend is not Backend.STUB and self.weights_path is None:
            raise BackendError(f"backend {self.backend.value} requires weights_path")
        if self.frame_sampling < 1:
            raise BackendError(f"frame_sampling must be >= 1, got {self.frame_sampling}")
        if self.pick_width < 1:
            raise BackendError(f"pick_width must be >= 1, got {self.pick_width}")
        if self.backend is Backend.STUB and self.stub_mode is StubMode.ORACLE \
                and self.manifest_path is None:
            raise BackendError("stub oracle mode requires manifest_path")

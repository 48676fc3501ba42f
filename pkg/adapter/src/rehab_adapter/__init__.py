"""Inference bridge emitting engine-format prediction streams from video files."""

from .backends import infer_clip_predictions, infer_pick_stream
from .errors import AdapterError, BackendError, VideoReadError
from .formats import clip_prediction_lines, pick_stream_lines, read_manifest_videos
from .spec import Backend, BackendSpec, StubMode

__version__ = "0.1.0"

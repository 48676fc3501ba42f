"""Offline analysis engine for egocentric hand-rehabilitation sessions.

Models session annotations (exercise labels, repetition timestamps, form
judgements, counting segments), counts exercise repetitions from per-frame
pick-probability streams via run-length despiking and rising-edge counting,
scores recognition/form/counting predictions, and generates evaluation splits
and synthetic benchmark corpora.
"""

from .errors import (
    EvaluationError,
    ManifestError,
    RehabkitError,
    StreamError,
    ValidationError,
)
from .evaluation import (
    ClassificationReport,
    CountingReport,
    CountingStats,
    Split,
    SplitMode,
    SplitSpec,
    argmax_invariance_check,
    counting_report,
    make_splits,
    render_classification_table,
    render_counting_table,
    render_loocv_table,
    top1,
    write_split,
)
from .intervals import FrameInterval
from .labels import (
    ALL_LABELS,
    ExerciseLabel,
    ExerciseType,
    Hand,
    NUM_EXERCISE_TYPES,
    NUM_LABELS,
    exercise_type_of,
    label_from_index,
    label_index,
)
from .manifest import (
    CountingSegment,
    DEFAULT_PICK_WIDTH,
    FormLabel,
    FormVerdict,
    SessionManifest,
    VideoRecord,
    count_repetition_starts,
    derive_pick_labels,
    load_manifest,
    parse_manifest,
    sample_counting_segments,
    save_manifest,
    serialize_manifest,
    with_segments,
)
from .results import (
    CountRecord,
    parse_count_results,
    serialize_count_results,
)
from .repcount import (
    CountResult,
    DEFAULT_FILTER_CONFIG,
    FilterConfig,
    apply_filter_pipeline,
    count_repetitions,
    count_rising_edges,
    filter_runs,
)
from .streams import (
    BinarySequence,
    ClipPrediction,
    PickStream,
    Task,
    binarize,
    parse_clip_predictions,
    parse_clip_truth,
    parse_pick_streams,
    serialize_clip_predictions,
    serialize_clip_truth,
    serialize_pick_streams,
)
from .synthetic import (
    AblationRow,
    Corpus,
    NoiseModel,
    TABLE6_CONFIGS,
    ablation_sweep,
    corrupt,
    gen_corpus,
    gen_session,
)

__version__ = "0.1.0"

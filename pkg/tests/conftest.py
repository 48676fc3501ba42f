import pytest

from rehabkit import (
    CountingSegment,
    ExerciseLabel,
    ExerciseType,
    FormLabel,
    FormVerdict,
    FrameInterval,
    Hand,
    SessionManifest,
    VideoRecord,
)


def make_video(
    video_id="vid-1",
    subject_id="S-I",
    exercise=ExerciseType.TOWEL_HAND_CLOSING,
    hand=Hand.LEFT,
    fps=30.0,
    num_frames=120,
    repetitions=((0, 30), (30, 60), (60, 90)),
    form_labels=(),
):
    return VideoRecord(
        video_id=video_id,
        subject_id=subject_id,
        label=ExerciseLabel(exercise, hand),
        fps=fps,
        num_frames=num_frames,
        repetitions=tuple(FrameInterval(s, e) for s, e in repetitions),
        form_labels=tuple(
            FormLabel(FrameInterval(s, e), FormVerdict(v)) for s, e, v in form_labels
        ),
    )


@pytest.fixture
def toy_video():
    return make_video()


@pytest.fixture
def toy_manifest(toy_video):
    segment = CountingSegment(toy_video.video_id, FrameInterval(0, 90), 3)
    return SessionManifest((toy_video,), (segment,))

import pytest

from rehabkit import (
    ALL_LABELS,
    ExerciseLabel,
    ExerciseType,
    Hand,
    ValidationError,
    exercise_type_of,
    label_from_index,
    label_index,
)


def test_exactly_25_valid_labels():
    assert len(ALL_LABELS) == 25
    assert len(set(ALL_LABELS)) == 25


def test_both_hands_only_for_pushing_hands():
    for ex in ExerciseType:
        if ex is ExerciseType.PUSHING_HANDS:
            ExerciseLabel(ex, Hand.BOTH)
            with pytest.raises(ValidationError, match="Pushing Hands requires hand=both"):
                ExerciseLabel(ex, Hand.LEFT)
            with pytest.raises(ValidationError, match="Pushing Hands requires hand=both"):
                ExerciseLabel(ex, Hand.RIGHT)
        else:
            ExerciseLabel(ex, Hand.LEFT)
            ExerciseLabel(ex, Hand.RIGHT)
            with pytest.raises(ValidationError):
                ExerciseLabel(ex, Hand.BOTH)


def test_exercise_type_ignores_hand():
    assert exercise_type_of(ExerciseLabel(ExerciseType.TOWEL_HAND_CLOSING, Hand.LEFT)) \
        is ExerciseType.TOWEL_HAND_CLOSING
    assert exercise_type_of(ExerciseLabel(ExerciseType.TOWEL_HAND_CLOSING, Hand.RIGHT)) \
        is ExerciseType.TOWEL_HAND_CLOSING
    assert exercise_type_of(ExerciseLabel(ExerciseType.PUSHING_HANDS, Hand.BOTH)) \
        is ExerciseType.PUSHING_HANDS
    left = ExerciseLabel(ExerciseType.HAND_SLIDE, Hand.LEFT)
    right = ExerciseLabel(ExerciseType.HAND_SLIDE, Hand.RIGHT)
    assert exercise_type_of(left) is exercise_type_of(right)


def test_label_index_round_trip():
    for i, label in enumerate(ALL_LABELS):
        assert label_index(label) == i
        assert label_from_index(i) == label
    with pytest.raises(ValidationError):
        label_from_index(25)
    with pytest.raises(ValidationError):
        label_from_index(-1)


def test_roman_parsing():
    assert ExerciseType.from_roman("I") is ExerciseType.TOWEL_HAND_CLOSING
    assert ExerciseType.from_roman("xiii") is ExerciseType.PUSHING_HANDS
    with pytest.raises(ValidationError):
        ExerciseType.from_roman("XIV")


def test_display_names_cover_all_types():
    names = {ex.display_name for ex in ExerciseType}
    assert len(names) == 13
    assert "Towel Hand Closing" in names
    assert "Pushing Hands" in names

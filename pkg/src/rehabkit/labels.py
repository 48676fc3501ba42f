"""Exercise label scheme: 13 exercise types, split by hand into 25 classes.

Every exercise type except Pushing Hands is performed and labelled separately
per hand (left/right). Pushing Hands involves both hands and exists only as a
single both-hands label, giving 12 * 2 + 1 = 25 valid labels in total.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import ValidationError


class ExerciseType(enum.Enum):
    TOWEL_HAND_CLOSING = 1
    FINGER_NERVE_GLIDE = 2
    WRIST_CURL = 3
    HAND_SLIDE = 4
    WRIST_FLEXION_AND_EXTENSION = 5
    PEN_SLIDE = 6
    PEN_SPIN = 7
    COIN_DROP = 8
    PALM_UP_AND_DOWN = 9
    BALL_GRIP = 10
    WRIST_EXTENSION = 11
    ROLLING_BOTTLE = 12
    PUSHING_HANDS = 13

    @property
    def roman(self) -> str:
        return _ROMAN[self.value]

    @property
    def display_name(self) -> str:
        return _DISPLAY_NAMES[self]

    @classmethod
    def from_roman(cls, text: str) -> "ExerciseType":
        try:
            return cls(_ROMAN.index(text.strip().upper()))
        except ValueError:
            raise ValidationError(f"unknown exercise type {text!r}") from None


_ROMAN = [
    "", "I", "II", "III", "IV", "V", "VI", "VII",
    "VIII", "IX", "X", "XI", "XII", "XIII",
]

_DISPLAY_NAMES = {
    ExerciseType.TOWEL_HAND_CLOSING: "Towel Hand Closing",
    ExerciseType.FINGER_NERVE_GLIDE: "Finger Nerve Glide",
    ExerciseType.WRIST_CURL: "Wrist Curl",
    ExerciseType.HAND_SLIDE: "Hand Slide",
    ExerciseType.WRIST_FLEXION_AND_EXTENSION: "Wrist Flexion and Ext.",
    ExerciseType.PEN_SLIDE: "Pen Slide",
    ExerciseType.PEN_SPIN: "Pen Spin",
    ExerciseType.COIN_DROP: "Coin Drop",
    ExerciseType.PALM_UP_AND_DOWN: "Palm Up and Down",
    ExerciseType.BALL_GRIP: "Ball Grip",
    ExerciseType.WRIST_EXTENSION: "Wrist Extension",
    ExerciseType.ROLLING_BOTTLE: "Rolling Bottle",
    ExerciseType.PUSHING_HANDS: "Pushing Hands",
}


class Hand(enum.Enum):
    LEFT = "left"
    RIGHT = "right"
    BOTH = "both"


@dataclass(frozen=True)
class ExerciseLabel:
    """One of the 25 valid (exercise type, hand) classes."""

    exercise_type: ExerciseType
    hand: Hand

    def __post_init__(self):
        if self.exercise_type is ExerciseType.PUSHING_HANDS:
            if self.hand is not Hand.BOTH:
                raise ValidationError(
                    f"invalid label ({self.exercise_type.roman}, {self.hand.value}): "
                    "Pushing Hands requires hand=both"
                )
        elif self.hand is Hand.BOTH:
            raise ValidationError(
                f"invalid label ({self.exercise_type.roman}, both): "
                f"{self.exercise_type.display_name} requires hand=left or hand=right"
            )

    def __str__(self) -> str:
        return f"{self.exercise_type.roman}/{self.hand.value}"


def _all_labels() -> tuple[ExerciseLabel, ...]:
    labels = []
    for ex in ExerciseType:
        if ex is ExerciseType.PUSHING_HANDS:
            labels.append(ExerciseLabel(ex, Hand.BOTH))
        else:
            labels.append(ExerciseLabel(ex, Hand.LEFT))
            labels.append(ExerciseLabel(ex, Hand.RIGHT))
    return tuple(labels)


#: Canonical class ordering used for 25-way score vectors.
ALL_LABELS: tuple[ExerciseLabel, ...] = _all_labels()

_LABEL_INDEX = {label: i for i, label in enumerate(ALL_LABELS)}

NUM_LABELS = len(ALL_LABELS)
NUM_EXERCISE_TYPES = len(ExerciseType)


def label_index(label: ExerciseLabel) -> int:
    """Class index of `label` in the canonical 25-way ordering."""
    return _LABEL_INDEX[label]


def label_from_index(index: int) -> ExerciseLabel:
    if not 0 <= index < NUM_LABELS:
        raise ValidationError(f"label index {index} outside [0, {NUM_LABELS})")
    return ALL_LABELS[index]


def exercise_type_of(label: ExerciseLabel) -> ExerciseType:
    """Collapse a label to its exercise type, ignoring which hand performed it."""
    return label.exercise_type

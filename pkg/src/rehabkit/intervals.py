"""Half-open frame intervals, 0-based."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ValidationError


@dataclass(frozen=True, order=True)
class FrameInterval:
    """[start, end) in frame indices. May be empty (start == end)."""

    start: int
    end: int

    def __post_init__(self):
        if not (isinstance(self.start, int) and isinstance(self.end, int)):
            raise ValidationError(f"interval bounds must be integers, got [{self.start!r}, {self.end!r})")
        if self.start < 0:
            raise ValidationError(f"interval [{self.start}, {self.end}): negative start")
        if self.start > self.end:
            raise ValidationError(f"interval [{self.start}, {self.end}): start > end")

    def __len__(self) -> int:
        return self.end - self.start

    def contains_frame(self, frame: int) -> bool:
        return self.start <= frame < self.end

    def as_pair(self) -> list[int]:
        return [self.start, self.end]

"""count-results v1: per-segment counting output written by the CLI.

    header: {"format": "count-results", "version": 1}
    record: {"video_id": str, "segment": [start, end], "count": int,
             "edge_positions": [offset, ...]}

Edge positions are offsets into the stream, not absolute frame indices.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import _lineio
from .errors import ValidationError
from .intervals import FrameInterval

COUNT_RESULTS_FORMAT = ("count-results", 1)


@dataclass(frozen=True)
class CountRecord:
    video_id: str
    segment: FrameInterval
    count: int
    edge_positions: tuple[int, ...]

    @property
    def segment_id(self) -> str:
        return f"{self.video_id}:{self.segment.start}-{self.segment.end}"


def parse_count_results(data: bytes | str) -> list[CountRecord]:
    records = []
    for lineno, rec in _lineio.iter_records(data, *COUNT_RESULTS_FORMAT):
        try:
            seg = rec["segment"]
            records.append(
                CountRecord(
                    video_id=str(rec["video_id"]),
                    segment=FrameInterval(
                        _lineio.as_strict_int(seg[0], "frame index"),
                        _lineio.as_strict_int(seg[1], "frame index"),
                    ),
                    count=_lineio.as_strict_int(rec["count"], "count"),
                    edge_positions=tuple(
                        _lineio.as_strict_int(p, "edge position") for p in rec["edge_positions"]
                    ),
                )
            )
        except ValidationError as e:
            raise ValidationError(f"line {lineno}: {e}") from None
        except (KeyError, TypeError, ValueError, IndexError) as e:
            raise ValidationError(f"line {lineno}: bad count record: {e!r}") from None
    return records


def serialize_count_results(records: list[CountRecord]) -> str:
    return _lineio.render_lines(
        _lineio.header_line(*COUNT_RESULTS_FORMAT),
        records,
        lambda r: {
            "video_id": r.video_id,
            "segment": r.segment.as_pair(),
            "count": r.count,
            "edge_positions": list(r.edge_positions),
        },
    )

"""Repetition counting: run-length noise filtering + rising-edge counting.

A repetition shows up in a binarized pick stream as a short run of 1s at the
repetition start. Counting is therefore: erase implausibly short 1-runs
(false detections), fill implausibly short 0-runs (gaps inside a pick), then
count 0->1 transitions. Boundary runs are filtered by the same length rule as
interior runs, and the counter treats the sequence as preceded by an implicit
0 so a stream that begins mid-pick still counts that pick.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ValidationError
from .streams import BinarySequence, PickStream, binarize

#: Largest run length the filters can be configured to touch.
MAX_FILTER_LEN = 6


@dataclass(frozen=True)
class FilterConfig:
    """Run-length thresholds: erase 1-runs of length <= fil1_max_len, then
    fill 0-runs of length <= fil0_max_len. 0 disables a filter."""

    fil1_max_len: int = 5
    fil0_max_len: int = 3

    def __post_init__(self):
        for name, value in (("fil1_max_len", self.fil1_max_len), ("fil0_max_len", self.fil0_max_len)):
            if not (isinstance(value, int) and 0 <= value <= MAX_FILTER_LEN):
                raise ValidationError(f"{name} must be an integer in [0, {MAX_FILTER_LEN}], got {value!r}")

    def __str__(self) -> str:
        return f"({self.fil1_max_len}, {self.fil0_max_len})"


#: Ablation optimum: erase 1-runs up to 5, fill 0-runs up to 3.
DEFAULT_FILTER_CONFIG = FilterConfig(5, 3)


@dataclass(frozen=True)
class CountResult:
    count: int
    edge_positions: tuple[int, ...]
    filtered_sequence: BinarySequence

    def __post_init__(self):
        if self.count != len(self.edge_positions):
            raise ValidationError(
                f"count {self.count} != number of edges {len(self.edge_positions)}"
            )
        if any(b <= a for a, b in zip(self.edge_positions, self.edge_positions[1:])):
            raise ValidationError("edge positions must be strictly ascending")


def _runs(bits: tuple[int, ...]) -> list[tuple[int, int]]:
    """Maximal runs as (value, length) pairs, by linear scan."""
    runs = []
    i = 0
    n = len(bits)
    while i < n:
        j = i
        while j < n and bits[j] == bits[i]:
            j += 1
        runs.append((bits[i], j - i))
        i = j
    return runs


def filter_runs(seq: BinarySequence, value: int, max_len: int) -> BinarySequence:
    """Replace every maximal run of `value` with length <= max_len by the
    complementary value. max_len = 0 is the identity."""
    if value not in (0, 1):
        raise ValidationError(f"filter value must be 0 or 1, got {value!r}")
    if not (isinstance(max_len, int) and max_len >= 0):
        raise ValidationError(f"max_len must be a non-negative integer, got {max_len!r}")
    if max_len == 0:
        return seq
    out = []
    for run_value, length in _runs(seq.bits):
        if run_value == value and length <= max_len:
            run_value = 1 - run_value
        out.extend([run_value] * length)
    return BinarySequence(tuple(out))


def apply_filter_pipeline(
    seq: BinarySequence, config: FilterConfig, fil1_first: bool = True
) -> BinarySequence:
    """Both despiking filters in sequence (default: erase 1-spikes, then fill 0-gaps)."""
    if fil1_first:
        return filter_runs(filter_runs(seq, 1, config.fil1_max_len), 0, config.fil0_max_len)
    return filter_runs(filter_runs(seq, 0, config.fil0_max_len), 1, config.fil1_max_len)


def count_rising_edges(seq: BinarySequence) -> CountResult:
    """Count 0->1 transitions, with an implicit 0 before the first element."""
    edges = []
    prev = 0
    for i, b in enumerate(seq.bits):
        if b == 1 and prev == 0:
            edges.append(i)
        prev = b
    return CountResult(len(edges), tuple(edges), seq)


def count_repetitions(
    stream: PickStream,
    threshold: float = 0.5,
    config: FilterConfig = DEFAULT_FILTER_CONFIG,
    fil1_first: bool = True,
) -> CountResult:
    """Full counting pipeline for one pick-probability stream.

    Edge positions are offsets into the stream, not absolute frame indices.
    An empty stream yields count 0.
    """
    filtered = apply_filter_pipeline(binarize(stream, threshold), config, fil1_first)
    return count_rising_edges(filtered)

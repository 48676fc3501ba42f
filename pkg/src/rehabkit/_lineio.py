"""Shared plumbing for the versioned line-oriented file formats.

Every engine file is UTF-8 text: a mandatory JSON header line declaring the
format name and version, followed by one JSON object per record line. Blank
lines are ignored so files stay diff- and cat-friendly.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from typing import Any, Callable, Iterable, Iterator

from .errors import ValidationError


def header_line(format_name: str, version: int) -> str:
    return json.dumps({"format": format_name, "version": version})


def iter_records(
    data: bytes | str,
    format_name: str,
    version: int,
    error_cls: type[ValidationError] = ValidationError,
) -> Iterator[tuple[int, dict]]:
    """Yield (line_number, record) pairs after checking the header line.

    Line numbers are 1-based and refer to the physical line in the input.
    """
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as e:
            raise error_cls(f"input is not valid UTF-8: {e}") from None

    lines = data.splitlines()
    header = None
    body_start = 0
    for i, line in enumerate(lines):
        if line.strip():
            header = line
            body_start = i + 1
            break
    if header is None:
        raise error_cls(f"empty input: missing {format_name} header line")

    try:
        head = json.loads(header)
    except json.JSONDecodeError as e:
        raise error_cls(f"line {body_start}: malformed header: {e.msg}") from None
    if not isinstance(head, dict) or head.get("format") != format_name:
        raise error_cls(
            f"line {body_start}: expected header for format {format_name!r}, got {header.strip()!r}"
        )
    if head.get("version") != version:
        raise error_cls(
            f"unsupported {format_name} version {head.get('version')!r} (expected {version})"
        )

    for lineno0, line in enumerate(lines[body_start:], start=body_start + 1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as e:
            raise error_cls(f"line {lineno0}: malformed record: {e.msg}") from None
        if not isinstance(record, dict):
            raise error_cls(f"line {lineno0}: record must be a JSON object")
        yield lineno0, record


def require(
    record: dict,
    key: str,
    lineno: int,
    error_cls: type[ValidationError] = ValidationError,
) -> Any:
    if key not in record:
        raise error_cls(f"line {lineno}: record missing field {key!r}")
    return record[key]


def as_strict_int(value: Any, what: str) -> int:
    """Reject JSON payloads where an integer field carries a float or bool."""
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValueError(f"{what} must be an integer, got {value!r}")
    return value


def as_number(value: Any, what: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValueError(f"{what} must be a number, got {value!r}")
    return float(value)


def dump_record(record: dict) -> str:
    return json.dumps(record, ensure_ascii=False, separators=(", ", ": "))


def float_repr(value: float) -> str:
    """Canonical probability/score formatting: 9 significant digits.

    Values written this way round-trip bit-exactly through float() and a
    second formatting pass. Non-finite values use the json.loads-compatible
    NaN/Infinity spellings.
    """
    value = float(value)
    if math.isnan(value):
        return "NaN"
    if math.isinf(value):
        return "Infinity" if value > 0 else "-Infinity"
    return format(value, ".9g")


def write_text_atomic(path: os.PathLike | str, text: str) -> None:
    """Write `text` to `path` via a temp file + rename so readers never see partial output."""
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def render_lines(header: str, records: Iterable[dict], to_dict: Callable[[Any], dict] | None = None) -> str:
    parts = [header]
    for rec in records:
        parts.append(dump_record(to_dict(rec) if to_dict else rec))
    return "\n".join(parts) + "\n"

"""
LPStream: Stream Events and Ingestion

One event per line:

    + x1 ... xd                    MEB point
    + x1 ... xd | y                SVM / classification point, y in {-1, +1}
    + a1 ... ad b                  LP row a.x <= b
    + k i1 j1 v1 ... ik jk vk | b  SDP / saddle row: k sparse entries of A
                                   (0-based, each mirrored to (j, i)) and b

`-` instead of `+` deletes one copy. Blank lines and lines starting with `#`
are skipped. Malformed lines raise StreamFormatError with the line number.

Streams are replayable: every replay() is one pass and bumps `passes`.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Iterator, Optional, Sequence

from lpstream.errors import EmptyInputError, StreamFormatError, UsageError

logger = logging.getLogger(__name__)


class Op(str, Enum):
    INSERT = "+"
    DELETE = "-"


@dataclass(frozen=True)
class StreamEvent:
    op: Op
    point: tuple
    label: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "op", Op(self.op))
        object.__setattr__(self, "point", tuple(float(v) for v in self.point))

    @property
    def sign(self) -> int:
        return 1 if self.op is Op.INSERT else -1


def insert(point, label: Optional[int] = None) -> StreamEvent:
    return StreamEvent(Op.INSERT, tuple(point), label)


def delete(point, label: Optional[int] = None) -> StreamEvent:
    return StreamEvent(Op.DELETE, tuple(point), label)


# ============================================================
# Grammar
# ============================================================

# problem name -> record kind
RECORD_KINDS = {
    "meb": "point",
    "svm": "labeled",
    "classify": "labeled",
    "lp": "row",
    "sdp": "matrix",
    "saddle": "matrix",
}


def _numbers(tokens: Sequence[str], line_number: int) -> list:
    try:
        return [float(t) for t in tokens]
    except ValueError as exc:
        raise StreamFormatError(f"not a number in {' '.join(tokens)!r}", line_number) from exc


def _matrix_point(tokens: Sequence[str], d: int, line_number: int) -> tuple:
    if "|" not in tokens:
        raise StreamFormatError("matrix row needs '| b'", line_number)
    bar = tokens.index("|")
    head, tail = tokens[:bar], tokens[bar + 1:]
    if len(tail) != 1:
        raise StreamFormatError("expected exactly one value after '|'", line_number)
    if not head:
        raise StreamFormatError("missing entry count", line_number)
    try:
        k = int(head[0])
    except ValueError as exc:
        raise StreamFormatError(f"entry count {head[0]!r} is not an integer", line_number) from exc
    if len(head) != 1 + 3 * k:
        raise StreamFormatError(f"expected {k} (i, j, v) triplets, got {len(head) - 1} values", line_number)

    A = [0.0] * (d * d)
    for t in range(k):
        i_token, j_token, v_token = head[1 + 3 * t: 4 + 3 * t]
        try:
            i, j = int(i_token), int(j_token)
        except ValueError as exc:
            raise StreamFormatError(f"matrix index is not an integer in triplet {t + 1}", line_number) from exc
        if not (0 <= i < d and 0 <= j < d):
            raise StreamFormatError(f"matrix index ({i}, {j}) outside 0..{d - 1}", line_number)
        (value,) = _numbers([v_token], line_number)
        A[i * d + j] = value
        A[j * d + i] = value
    (b,) = _numbers(tail, line_number)
    return tuple(A) + (b,)


def parse_line(line: str, kind: str, d: int, line_number: int = 0) -> Optional[StreamEvent]:
    """One event, or None for blank and comment lines."""
    text = line.strip()
    if not text or text.startswith("#"):
        return None
    tokens = text.split()
    op_token, body = tokens[0], tokens[1:]
    if op_token not in ("+", "-"):
        raise StreamFormatError(f"line must start with '+' or '-', got {op_token!r}", line_number)

    if kind == "point":
        point, label = _numbers(body, line_number), None
        expected = d
    elif kind == "labeled":
        if len(body) < 2 or body[-2] != "|":
            raise StreamFormatError("labeled point needs '| y' at the end", line_number)
        point = _numbers(body[:-2], line_number)
        try:
            label = int(body[-1])
        except ValueError as exc:
            raise StreamFormatError(f"label {body[-1]!r} is not an integer", line_number) from exc
        if label not in (-1, 1):
            raise StreamFormatError(f"label must be -1 or +1, got {label}", line_number)
        expected = d
    elif kind == "row":
        point, label = _numbers(body, line_number), None
        expected = d + 1
    elif kind == "matrix":
        point, label = _matrix_point(body, d, line_number), None
        expected = d * d + 1
    else:
        raise UsageError(f"unknown record kind {kind!r}")

    if len(point) != expected:
        raise StreamFormatError(f"expected {expected} values, got {len(point)}", line_number)
    return StreamEvent(Op(op_token), tuple(point), label)


def parse_stream(lines: Iterable[str], kind: str, d: int) -> Iterator[StreamEvent]:
    for number, line in enumerate(lines, start=1):
        event = parse_line(line, kind, d, number)
        if event is not None:
            yield event


def infer_dimension(lines: Iterable[str], kind: str) -> int:
    """Dimension implied by the data lines (largest matrix index + 1 for matrix rows)."""
    best = 0
    for number, line in enumerate(lines, start=1):
        tokens = line.split()
        if not tokens or tokens[0].startswith("#"):
            continue
        body = tokens[1:]
        if kind == "point":
            return len(body)
        if kind == "labeled":
            return len(body) - 2
        if kind == "row":
            return len(body) - 1
        if kind == "matrix":
            try:
                k = int(body[0])
                indices = [int(body[1 + 3 * t + s]) for t in range(k) for s in (0, 1)]
            except (ValueError, IndexError) as exc:
                raise StreamFormatError("cannot read matrix indices", number) from exc
            best = max([best] + [i + 1 for i in indices])
    if best == 0:
        raise EmptyInputError("no data lines to infer the dimension from")
    return best


def format_event(event: StreamEvent, kind: str, d: int) -> str:
    values = list(event.point)
    if kind == "labeled":
        return f"{event.op.value} {' '.join(repr(v) for v in values)} | {event.label}"
    if kind == "matrix":
        A, b = values[:-1], values[-1]
        entries = [(i, j, A[i * d + j]) for i in range(d) for j in range(i, d) if A[i * d + j] != 0]
        flat = " ".join(f"{i} {j} {v!r}" for i, j, v in entries)
        return f"{event.op.value} {len(entries)} {flat} | {b!r}".replace("  ", " ")
    return f"{event.op.value} {' '.join(repr(v) for v in values)}"


# ============================================================
# Replayable streams
# ============================================================

class EventStream:
    """In-memory event sequence."""

    def __init__(self, events: Iterable[StreamEvent]):
        self.events = list(events)
        self.passes = 0

    def replay(self) -> Iterator[StreamEvent]:
        self.passes += 1
        return iter(self.events)

    def __len__(self) -> int:
        return len(self.events)


class FileEventStream:
    """Event file parsed anew on every pass."""

    def __init__(self, path, kind: str, d: int):
        self.path = Path(path)
        self.kind = kind
        self.d = d
        self.passes = 0
        if not self.path.is_file():
            raise FileNotFoundError(f"stream file not found: {self.path}")

    def replay(self) -> Iterator[StreamEvent]:
        self.passes += 1
        with self.path.open(encoding="utf-8") as handle:
            yield from parse_stream(handle, self.kind, self.d)

    def load(self) -> EventStream:
        """Parse once into memory (does not count as a pass)."""
        with self.path.open(encoding="utf-8") as handle:
            return EventStream(parse_stream(handle, self.kind, self.d))


def as_stream(events) -> "EventStream | FileEventStream":
    if isinstance(events, (EventStream, FileEventStream)):
        return events
    return EventStream(events)

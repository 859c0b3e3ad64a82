from lpstream.streams.events import (
    RECORD_KINDS,
    EventStream,
    FileEventStream,
    Op,
    StreamEvent,
    as_stream,
    delete,
    format_event,
    infer_dimension,
    insert,
    parse_line,
    parse_stream,
)
from lpstream.streams.multipass import PassReport, center_multipass, run_multipass
from lpstream.streams.source import SnappedSource
from lpstream.streams.turnstile import (
    RawPointCodec,
    StrictTurnstileCheck,
    approx_max_norm,
    check_live_support,
    find_center_turnstile,
    run_turnstile,
)

__all__ = [
    "RECORD_KINDS",
    "EventStream",
    "FileEventStream",
    "Op",
    "PassReport",
    "RawPointCodec",
    "SnappedSource",
    "StreamEvent",
    "StrictTurnstileCheck",
    "approx_max_norm",
    "as_stream",
    "center_multipass",
    "check_live_support",
    "delete",
    "find_center_turnstile",
    "format_event",
    "infer_dimension",
    "insert",
    "parse_line",
    "parse_stream",
    "run_multipass",
    "run_turnstile",
]

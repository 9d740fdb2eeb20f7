"""XES event log parsing and directly-follows statistics.

Covers the plain XES 1.0/2.0 subset the benchmark logs use: one string
classifier attribute per event (default ``concept:name``), optional
gzip compression, lifecycle transitions ignored.
"""

from __future__ import annotations

import gzip
import io
import os
import xml.etree.ElementTree as ET
from collections import Counter
from dataclasses import dataclass, field
from typing import BinaryIO, Iterable, Union

Source = Union[str, "os.PathLike[str]", bytes, BinaryIO]

GZIP_MAGIC = b"\x1f\x8b"


class XesParseError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Event:
    activity: str
    timestamp: str | None = None

    def __post_init__(self) -> None:
        if not self.activity:
            raise ValueError("event activity must be non-empty")


@dataclass(frozen=True)
class Trace:
    case_id: str
    events: tuple[Event, ...] = ()

    def activities(self) -> tuple[str, ...]:
        return tuple(e.activity for e in self.events)


@dataclass(frozen=True)
class EventLog:
    traces: tuple[Trace, ...] = ()

    @property
    def alphabet(self) -> frozenset[str]:
        return frozenset(e.activity for t in self.traces for e in t.events)

    def activity_sequences(self) -> list[tuple[str, ...]]:
        return [t.activities() for t in self.traces]

    def __len__(self) -> int:
        return len(self.traces)


@dataclass
class DirectlyFollowsGraph:
    edge_freq: dict[tuple[str, str], int] = field(default_factory=dict)
    start_freq: dict[str, int] = field(default_factory=dict)
    end_freq: dict[str, int] = field(default_factory=dict)
    activity_freq: dict[str, int] = field(default_factory=dict)

    @property
    def activities(self) -> frozenset[str]:
        acts = set(self.activity_freq)
        for a, b in self.edge_freq:
            acts.add(a)
            acts.add(b)
        return frozenset(acts)


def _open_source(source: Source) -> BinaryIO:
    if isinstance(source, bytes):
        stream: BinaryIO = io.BytesIO(source)
    elif isinstance(source, (str, os.PathLike)):
        stream = open(source, "rb")
    else:
        stream = source
        if not stream.seekable():
            stream = io.BytesIO(stream.read())
    head = stream.read(2)
    stream.seek(-len(head), io.SEEK_CUR)
    if head == GZIP_MAGIC:
        return gzip.open(stream, "rb")  # type: ignore[return-value]
    return stream


def _localname(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def parse_xes(source: Source, classifier_key: str = "concept:name") -> EventLog:
    """Parse an XES document (optionally gzip-compressed) into an EventLog.

    One Trace per ``<trace>`` element in document order; one Event per
    ``<event>``, its activity taken from the string attribute named
    *classifier_key*.  Events missing that attribute are rejected.
    """

    stream = _open_source(source)
    traces: list[Trace] = []
    trace_index = 0
    case_id: str | None = None
    events: list[Event] = []
    in_trace = False
    pending: dict[str, str | None] = {}
    in_event = False

    try:
        for action, elem in ET.iterparse(stream, events=("start", "end")):
            tag = _localname(elem.tag)
            if action == "start":
                if tag == "trace":
                    in_trace = True
                    case_id = None
                    events = []
                elif tag == "event":
                    in_event = True
                    pending = {"activity": None, "timestamp": None}
                continue
            # end events
            if tag in ("string", "date") and (in_event or in_trace):
                key = elem.get("key")
                value = elem.get("value")
                if in_event:
                    if key == classifier_key and tag == "string":
                        pending["activity"] = value
                    elif key == "time:timestamp" and tag == "date":
                        pending["timestamp"] = value
                elif key == "concept:name" and tag == "string" and case_id is None:
                    case_id = value
            elif tag == "event":
                in_event = False
                if not pending.get("activity"):
                    raise XesParseError(
                        f"event without string attribute {classifier_key!r} "
                        f"in trace {trace_index}"
                    )
                events.append(
                    Event(activity=pending["activity"], timestamp=pending["timestamp"])
                )
                elem.clear()
            elif tag == "trace":
                in_trace = False
                traces.append(
                    Trace(case_id=case_id or f"case_{trace_index}", events=tuple(events))
                )
                trace_index += 1
                elem.clear()
    except ET.ParseError as exc:
        line, column = exc.position
        raise XesParseError(f"malformed XES XML: {exc.msg}", line, column) from exc

    return EventLog(traces=tuple(traces))


def dump_xes(log: EventLog) -> bytes:
    """Serialize a log back to plain XES (the debug round-trip format)."""

    out = io.StringIO()
    out.write('<?xml version="1.0" encoding="UTF-8"?>\n')
    out.write('<log xes.version="1.0" xes.features="">\n')
    for trace in log.traces:
        out.write("  <trace>\n")
        out.write(f'    <string key="concept:name" value="{_escape(trace.case_id)}"/>\n')
        for event in trace.events:
            out.write("    <event>\n")
            out.write(
                f'      <string key="concept:name" value="{_escape(event.activity)}"/>\n'
            )
            if event.timestamp:
                out.write(
                    f'      <date key="time:timestamp" value="{_escape(event.timestamp)}"/>\n'
                )
            out.write("    </event>\n")
        out.write("  </trace>\n")
    out.write("</log>\n")
    return out.getvalue().encode("utf-8")


def _escape(text: str) -> str:
    return (
        text.replace("&", "&amp;")
        .replace("<", "&lt;")
        .replace(">", "&gt;")
        .replace('"', "&quot;")
    )


def build_dfg(log: EventLog) -> DirectlyFollowsGraph:
    """Count adjacent activity pairs, trace starts/ends and totals."""
    return dfg_from_sequences(log.activity_sequences())


def dfg_from_sequences(sequences: Iterable[tuple[str, ...]]) -> DirectlyFollowsGraph:
    edges: Counter = Counter()
    starts: Counter = Counter()
    ends: Counter = Counter()
    acts: Counter = Counter()
    for seq in sequences:
        if seq:
            starts[seq[0]] += 1
            ends[seq[-1]] += 1
        for a in seq:
            acts[a] += 1
        for a, b in zip(seq, seq[1:]):
            edges[(a, b)] += 1
    return DirectlyFollowsGraph(
        edge_freq=dict(edges),
        start_freq=dict(starts),
        end_freq=dict(ends),
        activity_freq=dict(acts),
    )

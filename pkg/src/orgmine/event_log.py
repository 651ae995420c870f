"""Event log ingestion: CSV parsing, per-case grouping, prefix chunking and stats.

Every engine consumes an :class:`EventLog` produced here. Names are interned to
dense integer ids in first-appearance order so downstream matrices can be plain
integer-indexed arrays.
"""

from __future__ import annotations

import csv
import io
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import BinaryIO, Iterable, Sequence, TextIO, Union

import numpy as np

from .errors import EmptyLog, LogError, MalformedRow, MissingColumn, SizeOutOfRange

Column = Union[str, int]


@dataclass(frozen=True)
class ColumnMapping:
    """Which source columns hold the case id, activity and actor.

    Entries are header names, or 0-based indices when the file has no header.
    """

    case: Column = "case"
    activity: Column = "activity"
    actor: Column = "actor"
    timestamp: Column | None = None

    def required(self) -> tuple[Column, Column, Column]:
        return (self.case, self.activity, self.actor)


DEFAULT_SCHEMA = ColumnMapping()
BPI2014_SCHEMA = ColumnMapping(
    case="Incident_ID",
    activity="IncidentActivity_Type",
    actor="Assignment_Group",
)
BPI2014_DELIMITER = ";"


@dataclass(frozen=True)
class Event:
    case_id: str
    activity: str
    actor: str
    seq: int

    def __post_init__(self) -> None:
        for name in ("case_id", "activity", "actor"):
            if not getattr(self, name).strip():
                raise ValueError(f"event {name} must be non-empty")
        if self.seq < 0:
            raise ValueError("event seq must be non-negative")


@dataclass(frozen=True)
class Trace:
    """All events of one case, in log order.

    ``actor_ids``/``activity_ids`` are the dense ids of the owning log, aligned
    with ``events``; the position inside the trace is the event's OccID.
    """

    case_id: str
    events: tuple[Event, ...]
    actor_ids: tuple[int, ...]
    activity_ids: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.events)

    @classmethod
    def from_ids(
        cls,
        actor_ids: Sequence[int],
        activity_ids: Sequence[int] | None = None,
        case_id: str = "case",
    ) -> Trace:
        """Build a trace straight from dense ids (synthetic names ``a<id>``/``t<id>``)."""
        if activity_ids is None:
            activity_ids = [0] * len(actor_ids)
        if len(activity_ids) != len(actor_ids):
            raise ValueError("actor_ids and activity_ids differ in length")
        events = tuple(
            Event(case_id, f"t{t}", f"a{a}", i) for i, (a, t) in enumerate(zip(actor_ids, activity_ids))
        )
        return cls(case_id, events, tuple(int(a) for a in actor_ids), tuple(int(t) for t in activity_ids))


@dataclass(frozen=True)
class LogStats:
    event_count: int
    case_count: int
    unique_actors: int
    unique_activities: int

    def as_line(self) -> str:
        return (
            f"events={self.event_count} cases={self.case_count} "
            f"actors={self.unique_actors} activities={self.unique_activities}"
        )


def _intern(names: Iterable[str]) -> tuple[tuple[str, ...], dict[str, int], np.ndarray]:
    index: dict[str, int] = {}
    codes = []
    for name in names:
        code = index.get(name)
        if code is None:
            code = index[name] = len(index)
        codes.append(code)
    ordered = tuple(index)
    arr = np.asarray(codes, dtype=np.int64)
    arr.flags.writeable = False
    return ordered, index, arr


@dataclass(frozen=True)
class EventLog:
    """Immutable ordered event collection with dense actor/activity/case ids.

    Build one with :meth:`from_events`; ids follow first appearance in ``events``.
    ``skipped_rows`` counts rows dropped by a lenient parse.
    """

    events: tuple[Event, ...]
    skipped_rows: int = 0
    actors: tuple[str, ...] = field(init=False)
    activities: tuple[str, ...] = field(init=False)
    cases: tuple[str, ...] = field(init=False)
    actor_ids: np.ndarray = field(init=False, repr=False, compare=False)
    activity_ids: np.ndarray = field(init=False, repr=False, compare=False)
    case_ids: np.ndarray = field(init=False, repr=False, compare=False)
    _actor_index: dict[str, int] = field(init=False, repr=False, compare=False)
    _activity_index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        events = tuple(self.events)
        last = -1
        for ev in events:
            if ev.seq <= last:
                raise ValueError(f"event seq must be strictly increasing (got {ev.seq} after {last})")
            last = ev.seq
        actors, actor_index, actor_ids = _intern(ev.actor for ev in events)
        activities, activity_index, activity_ids = _intern(ev.activity for ev in events)
        cases, _, case_ids = _intern(ev.case_id for ev in events)
        set_ = object.__setattr__
        set_(self, "events", events)
        set_(self, "actors", actors)
        set_(self, "activities", activities)
        set_(self, "cases", cases)
        set_(self, "actor_ids", actor_ids)
        set_(self, "activity_ids", activity_ids)
        set_(self, "case_ids", case_ids)
        set_(self, "_actor_index", actor_index)
        set_(self, "_activity_index", activity_index)

    @classmethod
    def from_events(cls, events: Iterable[Event], skipped_rows: int = 0) -> EventLog:
        return cls(tuple(events), skipped_rows)

    @classmethod
    def from_triples(cls, rows: Iterable[tuple[str, str, str]]) -> EventLog:
        """Build a log from ``(case, activity, actor)`` triples, seq = position."""
        return cls(tuple(Event(str(c), str(t), str(a), i) for i, (c, t, a) in enumerate(rows)))

    def __len__(self) -> int:
        return len(self.events)

    def actor_id(self, name: str) -> int:
        return self._actor_index[name]

    def activity_id(self, name: str) -> int:
        return self._activity_index[name]

    def actor_name(self, actor_id: int) -> str:
        return self.actors[actor_id]

    def activity_name(self, activity_id: int) -> str:
        return self.activities[activity_id]

    def triples(self) -> list[tuple[str, str, str]]:
        return [(ev.case_id, ev.activity, ev.actor) for ev in self.events]


def _open_text(source: bytes | str | BinaryIO | TextIO) -> TextIO:
    if isinstance(source, bytes):
        return io.StringIO(source.decode("utf-8-sig"), newline="")
    if isinstance(source, str):
        return io.StringIO(source, newline="")
    if isinstance(source, io.TextIOBase):
        return source  # type: ignore[return-value]
    return io.TextIOWrapper(source, encoding="utf-8-sig", newline="")  # type: ignore[arg-type]


def parse_timestamp(raw: str) -> float:
    """Parse an ISO-8601 timestamp or epoch milliseconds to epoch seconds.

    Naive ISO timestamps are taken as UTC.
    """
    text = raw.strip()
    if text.lstrip("-").isdigit():
        return int(text) / 1000.0
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    try:
        parsed = datetime.fromisoformat(text)
    except ValueError:
        # BPI exports use "dd-mm-yyyy HH:MM:SS"
        try:
            parsed = datetime.strptime(text, "%d-%m-%Y %H:%M:%S")
        except ValueError:
            raise ValueError(f"unparseable timestamp {raw!r}") from None
    if parsed.tzinfo is None:
        parsed = parsed.replace(tzinfo=timezone.utc)
    return parsed.timestamp()


def _resolve(header: list[str] | None, column: Column) -> int:
    if header is None:
        if not isinstance(column, int) or isinstance(column, bool) or column < 0:
            raise LogError(f"without a header, columns must be 0-based indices (got {column!r})")
        return column
    if isinstance(column, int):
        if 0 <= column < len(header):
            return column
        raise MissingColumn(column)
    try:
        return header.index(column)
    except ValueError:
        raise MissingColumn(column) from None


def parse_csv(
    source: bytes | str | BinaryIO | TextIO,
    schema: ColumnMapping = DEFAULT_SCHEMA,
    delimiter: str = ",",
    has_header: bool = True,
    lenient: bool = False,
    sort_by_timestamp: bool = False,
) -> EventLog:
    """Parse a delimited event log.

    One event per data row, ``seq`` = 0-based data-row ordinal. Fields are
    whitespace-trimmed; blank lines are ignored. A row missing a mapped field is
    a :class:`MalformedRow`; with ``lenient=True`` such rows are skipped and
    counted in ``EventLog.skipped_rows``.
    """
    if len(set(schema.required())) != 3:
        raise LogError("column mapping must name three distinct columns")
    if sort_by_timestamp and schema.timestamp is None:
        raise LogError("sorting by timestamp needs a timestamp column mapping")
    if len(delimiter) != 1:
        raise LogError(f"delimiter must be a single character (got {delimiter!r})")

    reader = csv.reader(_open_text(source), delimiter=delimiter, quotechar='"', skipinitialspace=True)
    header: list[str] | None = None
    if has_header:
        for row in reader:
            if any(cell.strip() for cell in row):
                header = [cell.strip() for cell in row]
                break
        else:
            raise EmptyLog("input has no header row")

    positions = [_resolve(header, col) for col in schema.required()]
    ts_pos = _resolve(header, schema.timestamp) if schema.timestamp is not None else None

    events: list[Event] = []
    stamps: list[float] = []
    skipped = 0
    ordinal = -1
    for row in reader:
        if not any(cell.strip() for cell in row):
            continue
        ordinal += 1
        try:
            values = []
            for col, pos in zip(("case", "activity", "actor"), positions):
                if pos >= len(row):
                    raise MalformedRow(reader.line_num, f"row has {len(row)} fields, {col} expected at {pos}")
                value = row[pos].strip()
                if not value:
                    raise MalformedRow(reader.line_num, f"empty {col} field")
                values.append(value)
            if sort_by_timestamp:
                assert ts_pos is not None
                if ts_pos >= len(row):
                    raise MalformedRow(reader.line_num, "missing timestamp field")
                try:
                    stamps.append(parse_timestamp(row[ts_pos]))
                except ValueError as exc:
                    raise MalformedRow(reader.line_num, str(exc)) from None
        except MalformedRow:
            if not lenient:
                raise
            skipped += 1
            continue
        events.append(Event(values[0], values[1], values[2], ordinal))

    if not events:
        raise EmptyLog()
    if sort_by_timestamp:
        order = sorted(range(len(events)), key=lambda i: (stamps[i], events[i].seq))
        events = [
            Event(events[i].case_id, events[i].activity, events[i].actor, new_seq)
            for new_seq, i in enumerate(order)
        ]
    return EventLog.from_events(events, skipped_rows=skipped)


def read_log(path: str, **kwargs) -> EventLog:
    """Parse a log from a file path; ``"-"`` reads stdin."""
    if path == "-":
        return parse_csv(sys.stdin.buffer.read(), **kwargs)
    with open(path, "rb") as fh:
        return parse_csv(fh, **kwargs)


def to_csv(
    log: EventLog,
    schema: ColumnMapping = DEFAULT_SCHEMA,
    delimiter: str = ",",
    has_header: bool = True,
) -> bytes:
    """Serialize back to the same dialect ``parse_csv`` reads."""
    cols = schema.required()
    if has_header:
        if not all(isinstance(c, str) for c in cols):
            raise LogError("a header needs named columns")
        order = [0, 1, 2]
        width = 3
    else:
        if not all(isinstance(c, int) for c in cols):
            raise LogError("headerless output needs index columns")
        order = [int(c) for c in cols]
        width = max(order) + 1
    buf = io.StringIO(newline="")
    writer = csv.writer(buf, delimiter=delimiter, quotechar='"', lineterminator="\n")
    if has_header:
        writer.writerow(cols)
    for case_id, activity, actor in log.triples():
        row = [""] * width
        for pos, value in zip(order, (case_id, activity, actor)):
            row[pos] = value
        writer.writerow(row)
    return buf.getvalue().encode("utf-8")


def group_by_case(log: EventLog) -> list[Trace]:
    """Partition the log into traces, ordered by first appearance of each case."""
    if not log.events:
        raise EmptyLog()
    buckets: dict[str, list[int]] = {}
    for i, ev in enumerate(log.events):
        buckets.setdefault(ev.case_id, []).append(i)
    actor_ids = log.actor_ids.tolist()
    activity_ids = log.activity_ids.tolist()
    return [
        Trace(
            case_id,
            tuple(log.events[i] for i in idx),
            tuple(actor_ids[i] for i in idx),
            tuple(activity_ids[i] for i in idx),
        )
        for case_id, idx in buckets.items()
    ]


def chunk_prefixes(log: EventLog, sizes: Sequence[int]) -> list[EventLog]:
    """First ``sizes[k]`` events of the log, each with freshly rebuilt indexes."""
    previous = 0
    for size in sizes:
        if size < 1:
            raise SizeOutOfRange(size, "must be at least 1")
        if size > len(log):
            raise SizeOutOfRange(size, f"log has only {len(log)} events")
        if size <= previous:
            raise SizeOutOfRange(size, "sizes must be strictly increasing")
        previous = size
    return [EventLog.from_events(log.events[:size]) for size in sizes]


def stats(log: EventLog) -> LogStats:
    return LogStats(
        event_count=len(log.events),
        case_count=len(log.cases),
        unique_actors=len(log.actors),
        unique_activities=len(log.activities),
    )

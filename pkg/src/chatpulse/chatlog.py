"""Chat transcript parsing and anonymized (user, timestamp) message logs.

Only sender identity and send time survive parsing. Message bodies are
inspected just enough to classify each line (message start, continuation,
system notice) and are never stored; the persisted log has exactly two data
columns.
"""

from __future__ import annotations

import csv
import hashlib
import hmac
import io
import json
import logging
import re
import secrets
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from zoneinfo import ZoneInfo

from .errors import (
    MappingConflictError,
    OrderingError,
    ParameterError,
    ParseError,
    SchemaError,
)

logger = logging.getLogger(__name__)

# WhatsApp sprinkles direction marks and narrow no-break spaces into exports.
_INVISIBLE_MARKS = re.compile("[‎‏‪-‮]")

LOG_CSV_HEADER = ["user_id", "timestamp"]
MAPPING_CSV_HEADER = ["hashed_sender", "user_id"]


@dataclass(frozen=True, slots=True)
class MessageEvent:
    """One sent message: anonymized sender, epoch seconds UTC, file order."""

    user: int
    timestamp: int
    seq: int


@dataclass(frozen=True)
class MessageLog:
    """Chronologically ordered metadata log for one group conversation."""

    group_name: str
    events: tuple[MessageEvent, ...]
    user_count: int
    span: tuple[int, int] | None

    @classmethod
    def from_events(cls, events, group_name: str = "") -> "MessageLog":
        events = tuple(events)
        prev: MessageEvent | None = None
        for e in events:
            if e.user < 0:
                raise ValueError(f"negative user ID {e.user}")
            if prev is not None:
                if e.seq <= prev.seq:
                    raise ValueError(f"seq not strictly increasing at seq={e.seq}")
                if e.timestamp < prev.timestamp:
                    raise ValueError(
                        f"timestamps decrease at seq={e.seq} "
                        f"({e.timestamp} < {prev.timestamp})"
                    )
            prev = e
        span = (events[0].timestamp, events[-1].timestamp) if events else None
        return cls(
            group_name=group_name,
            events=events,
            user_count=len({e.user for e in events}),
            span=span,
        )

    def __len__(self) -> int:
        return len(self.events)


@dataclass(frozen=True)
class ParsedTranscript:
    """Parse result: the metadata log plus the sender table behind its IDs.

    ``senders[i]`` is the display name that first-appearance ID ``i`` stands
    for. The table exists solely to feed :func:`anonymize`; nothing else in
    the pipeline sees display names.
    """

    log: MessageLog
    senders: tuple[str, ...]


@dataclass(frozen=True)
class AnonymizedLog:
    """Salted relabeling of a parsed transcript plus its mapping table."""

    log: MessageLog
    mapping: dict[str, int]  # hex keyed-hash of sender -> user ID
    salt: bytes


@dataclass(frozen=True)
class ExportProfile:
    """Grammar for one export locale. No auto-detection: pick one explicitly."""

    name: str
    header: re.Pattern[str]
    timestamp_formats: tuple[str, ...]


PROFILES: dict[str, ExportProfile] = {
    # `D/M/YY, HH:MM - Sender Name: body`; the separator dash may be an
    # ASCII hyphen or U+2013 depending on the exporting device.
    "whatsapp-en-dash": ExportProfile(
        name="whatsapp-en-dash",
        header=re.compile(
            r"^(?P<ts>\d{1,2}/\d{1,2}/\d{2,4}, \d{1,2}:\d{2}) [-–] (?P<rest>.*)$"
        ),
        timestamp_formats=("%d/%m/%y, %H:%M", "%d/%m/%Y, %H:%M"),
    ),
    # `M/D/YY, H:MM AM - Sender: body` (US date order, 12-hour clock).
    "whatsapp-us-dash": ExportProfile(
        name="whatsapp-us-dash",
        header=re.compile(
            r"^(?P<ts>\d{1,2}/\d{1,2}/\d{2,4}, \d{1,2}:\d{2} ?[AaPp][Mm])"
            r" [-–] (?P<rest>.*)$"
        ),
        timestamp_formats=("%m/%d/%y, %I:%M %p", "%m/%d/%Y, %I:%M %p"),
    ),
    # `[D/M/YY, HH:MM:SS] Sender: body` (bracketed, usually iOS).
    "whatsapp-bracket": ExportProfile(
        name="whatsapp-bracket",
        header=re.compile(
            r"^\[(?P<ts>\d{1,2}/\d{1,2}/\d{2,4}, \d{1,2}:\d{2}(?::\d{2})?)\] (?P<rest>.*)$"
        ),
        timestamp_formats=(
            "%d/%m/%y, %H:%M:%S",
            "%d/%m/%Y, %H:%M:%S",
            "%d/%m/%y, %H:%M",
            "%d/%m/%Y, %H:%M",
        ),
    ),
}

DEFAULT_PROFILE = "whatsapp-en-dash"


def _clean_line(line: str) -> str:
    line = line.replace(" ", " ").replace(" ", " ")
    return _INVISIBLE_MARKS.sub("", line)


def _parse_header_timestamp(
    token: str, profile: ExportProfile, zone: ZoneInfo, line_no: int
) -> int:
    for fmt in profile.timestamp_formats:
        try:
            local = datetime.strptime(token, fmt)
        except ValueError:
            continue
        return int(local.replace(tzinfo=zone).timestamp())
    raise ParseError(f"unparseable timestamp {token!r}", line_no)


def _resolve_zone(tz: str | ZoneInfo) -> ZoneInfo:
    return tz if isinstance(tz, ZoneInfo) else ZoneInfo(tz)


def parse_transcript(
    text: str,
    *,
    tz: str | ZoneInfo = "UTC",
    profile: str = DEFAULT_PROFILE,
    group_name: str = "",
    slack: int = 0,
) -> ParsedTranscript:
    """Parse an exported transcript into a metadata log plus sender table.

    Line classification: a line matching the profile's header regex whose
    remainder contains ``Sender: `` starts a message; a matching line without
    a sender is a system notice (dropped); anything else continues the most
    recent message (dropped). A non-header line before the first message is a
    parse error, as is a timestamp that moves backward by more than ``slack``
    seconds (minute-precision exports legitimately produce same-minute ties,
    broken by file order).
    """
    if profile not in PROFILES:
        raise ParameterError(
            f"unknown export profile {profile!r}; available: {sorted(PROFILES)}"
        )
    prof = PROFILES[profile]
    zone = _resolve_zone(tz)

    events: list[MessageEvent] = []
    senders: list[str] = []
    ids: dict[str, int] = {}
    seen_any = False
    prev_ts: int | None = None

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = _clean_line(raw)
        match = prof.header.match(line)
        if match is None:
            if not seen_any:
                raise ParseError(
                    "not a header line and no preceding message to continue", line_no
                )
            continue  # continuation of the previous message; body discarded
        seen_any = True
        rest = match.group("rest")
        sep = rest.find(": ")
        if sep <= 0:
            # Header without `Sender: ` - a system notice (join, subject
            # change, encryption banner). No human sender, no event.
            continue
        sender = rest[:sep].strip()
        ts = _parse_header_timestamp(match.group("ts"), prof, zone, line_no)
        if prev_ts is not None and ts < prev_ts - slack:
            raise OrderingError(
                f"timestamp moves backward by {prev_ts - ts}s (slack={slack}s)",
                line_no,
            )
        prev_ts = max(prev_ts, ts) if prev_ts is not None else ts
        if sender not in ids:
            ids[sender] = len(senders)
            senders.append(sender)
        events.append(MessageEvent(user=ids[sender], timestamp=ts, seq=len(events)))

    # Within-slack regressions are clamped so the log stays non-decreasing.
    if slack > 0:
        fixed: list[MessageEvent] = []
        high = None
        for e in events:
            high = e.timestamp if high is None else max(high, e.timestamp)
            fixed.append(MessageEvent(e.user, high, e.seq))
        events = fixed

    log = MessageLog.from_events(events, group_name=group_name)
    return ParsedTranscript(log=log, senders=tuple(senders))


def parse_export(
    text: str,
    *,
    tz: str | ZoneInfo = "UTC",
    profile: str = DEFAULT_PROFILE,
    group_name: str = "",
    slack: int = 0,
) -> MessageLog:
    """Parse an exported transcript; sender names become first-appearance IDs."""
    return parse_transcript(
        text, tz=tz, profile=profile, group_name=group_name, slack=slack
    ).log


def sender_digest(salt: bytes, sender: str) -> str:
    """Keyed hash (HMAC-SHA256, hex) of a sender display name."""
    return hmac.new(salt, sender.encode("utf-8"), hashlib.sha256).hexdigest()


def _check_prior_mapping(prior: dict[str, int]) -> None:
    ids = sorted(prior.values())
    if any(i < 0 for i in ids):
        raise MappingConflictError("prior mapping contains a negative user ID")
    if len(set(ids)) != len(ids):
        raise MappingConflictError("prior mapping assigns one ID to several senders")
    if ids and ids != list(range(len(ids))):
        raise MappingConflictError(
            f"prior mapping IDs are not the dense range 0..{len(ids) - 1}"
        )


def anonymize(
    parsed: ParsedTranscript,
    salt: bytes | None = None,
    prior_mapping: dict[str, int] | None = None,
) -> AnonymizedLog:
    """Relabel a parsed transcript with salted, deterministic dense IDs.

    IDs are assigned by sorting sender keyed-hashes, so a fixed salt yields
    the same assignment on every run and a different salt permutes it. With a
    ``prior_mapping`` (from :func:`read_mapping`), existing assignments are
    kept and only unseen senders receive fresh IDs.
    """
    if salt is None:
        salt = secrets.token_bytes(16)
    mapping: dict[str, int] = dict(prior_mapping) if prior_mapping else {}
    _check_prior_mapping(mapping)

    digests = {sender: sender_digest(salt, sender) for sender in parsed.senders}
    if len(set(digests.values())) != len(digests):
        raise MappingConflictError(
            "keyed-hash collision between distinct senders; pick another salt"
        )
    fresh = sorted(d for d in digests.values() if d not in mapping)
    next_id = len(mapping)
    for digest in fresh:
        mapping[digest] = next_id
        next_id += 1

    relabel = [mapping[digests[s]] for s in parsed.senders]
    events = tuple(
        MessageEvent(user=relabel[e.user], timestamp=e.timestamp, seq=e.seq)
        for e in parsed.log.events
    )
    log = MessageLog.from_events(events, group_name=parsed.log.group_name)
    return AnonymizedLog(log=log, mapping=mapping, salt=salt)


def write_mapping(mapping: dict[str, int], path: str | Path) -> None:
    """Persist a keyed-hash mapping table as CSV, ordered by user ID."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(MAPPING_CSV_HEADER)
    for digest, user_id in sorted(mapping.items(), key=lambda kv: kv[1]):
        writer.writerow([digest, user_id])
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


def read_mapping(path: str | Path) -> dict[str, int]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != MAPPING_CSV_HEADER:
        raise SchemaError(f"{path}: expected header {','.join(MAPPING_CSV_HEADER)}")
    mapping: dict[str, int] = {}
    for row in rows[1:]:
        if len(row) != 2:
            raise SchemaError(f"{path}: malformed mapping row {row!r}")
        digest, raw_id = row
        try:
            user_id = int(raw_id)
        except ValueError as exc:
            raise SchemaError(f"{path}: non-integer user ID {raw_id!r}") from exc
        if digest in mapping:
            raise MappingConflictError(f"{path}: duplicate hashed sender {digest!r}")
        mapping[digest] = user_id
    return mapping


def _events_from_rows(
    rows: list[tuple[int, int]], source: str, group_name: str
) -> MessageLog:
    if any(t2 < t1 for (_, t1), (_, t2) in zip(rows, rows[1:])):
        logger.warning("%s: rows out of order; re-sorting by (timestamp, row)", source)
        order = sorted(range(len(rows)), key=lambda i: (rows[i][1], i))
        rows = [rows[i] for i in order]
    events = (
        MessageEvent(user=u, timestamp=t, seq=i) for i, (u, t) in enumerate(rows)
    )
    return MessageLog.from_events(events, group_name=group_name)


def _row_from_csv(row: list[str], line_no: int, source: str) -> tuple[int, int]:
    if len(row) != 2:
        raise SchemaError(f"{source}: line {line_no}: expected 2 columns, got {len(row)}")
    raw_user, raw_ts = row
    try:
        user = int(raw_user)
    except ValueError as exc:
        raise SchemaError(f"{source}: line {line_no}: bad user ID {raw_user!r}") from exc
    try:
        ts = int(raw_ts)
    except ValueError as exc:
        raise SchemaError(
            f"{source}: line {line_no}: unparsable timestamp {raw_ts!r}"
        ) from exc
    if user < 0:
        raise SchemaError(f"{source}: line {line_no}: negative user ID {user}")
    return user, ts


def _row_from_jsonl(line: str, line_no: int, source: str) -> tuple[int, int]:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{source}: line {line_no}: invalid JSON") from exc
    if not isinstance(obj, dict) or "u" not in obj or "t" not in obj:
        raise SchemaError(f"{source}: line {line_no}: expected keys 'u' and 't'")
    user, ts = obj["u"], obj["t"]
    if isinstance(user, bool) or not isinstance(user, int):
        raise SchemaError(f"{source}: line {line_no}: bad user ID {user!r}")
    if isinstance(ts, bool) or not isinstance(ts, int):
        raise SchemaError(f"{source}: line {line_no}: unparsable timestamp {ts!r}")
    if user < 0:
        raise SchemaError(f"{source}: line {line_no}: negative user ID {user}")
    return user, ts


def infer_log_format(path: str | Path) -> str:
    return "jsonl" if str(path).endswith((".jsonl", ".ndjson")) else "csv"


def load_log(
    path: str | Path, fmt: str | None = None, *, group_name: str | None = None
) -> MessageLog:
    """Load a canonical log file (CSV ``user_id,timestamp`` or JSONL)."""
    path = Path(path)
    fmt = fmt or infer_log_format(path)
    if fmt not in ("csv", "jsonl"):
        raise SchemaError(f"unknown log format {fmt!r}")
    name = path.stem if group_name is None else group_name
    text = path.read_text(encoding="utf-8")
    rows: list[tuple[int, int]] = []
    if fmt == "csv":
        parsed = list(csv.reader(io.StringIO(text)))
        if not parsed or parsed[0] != LOG_CSV_HEADER:
            raise SchemaError(f"{path}: missing header {','.join(LOG_CSV_HEADER)}")
        for line_no, row in enumerate(parsed[1:], start=2):
            rows.append(_row_from_csv(row, line_no, str(path)))
    else:
        for line_no, line in enumerate(text.splitlines(), start=1):
            if line.strip():
                rows.append(_row_from_jsonl(line, line_no, str(path)))
    return _events_from_rows(rows, str(path), name)


def dump_log(log: MessageLog, fmt: str = "csv") -> str:
    """Serialize a log to its canonical textual form."""
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(LOG_CSV_HEADER)
        for e in log.events:
            writer.writerow([e.user, e.timestamp])
        return buf.getvalue()
    if fmt == "jsonl":
        return "".join(f'{{"u":{e.user},"t":{e.timestamp}}}\n' for e in log.events)
    raise SchemaError(f"unknown log format {fmt!r}")


def write_log(log: MessageLog, path: str | Path, fmt: str | None = None) -> None:
    path = Path(path)
    fmt = fmt or infer_log_format(path)
    path.write_text(dump_log(log, fmt), encoding="utf-8")


def utc_timestamp(text: str) -> int:
    """Epoch seconds for an ISO date or datetime; naive values are UTC."""
    dt = datetime.fromisoformat(text.replace("Z", "+00:00"))
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return int(dt.timestamp())

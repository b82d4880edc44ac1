"""Vendor export detection, parsing, and standardization.

The four supported vendors ship exports with different timestamp formats,
value types, and presence/absence of end times. Each (vendor, file kind)
pair has one documented CSV schema here; parsing turns rows into RawRecords
with standardized labels, timestamps (naive local, second precision), and
units. Malformed rows degrade to diagnostics rather than aborting the file;
a file aborts only on header or encoding failure.

Schema notes, per vendor:

* samsung  - timestamps ``YYYY-MM-DD HH:MM:SS.mmm`` (milliseconds truncated);
  sleep stages are integer codes resolved through a mandatory code map
  (shipped defaults are placeholders, not authoritative).
* apple    - timestamps carry a UTC offset and are converted into the
  dataset timezone; SpO2 is fractional (float percent) and is rounded to an
  integer, half away from zero; exercise rows carry no step count.
* fitbit   - ``MM/DD/YY HH:MM:SS`` for activity/exercise/heart rate
  (two-digit years map to 2000-2099); ISO ``YYYY-MM-DDTHH:MM:SS.mmm`` for
  SpO2/sleep; missing end times are completed as start + duration.
* xiaomi   - separate date and time columns; no SpO2 export at all;
  sleep-stage rows are daily aggregates and are not window-assignable, so
  they are reported as diagnostics and skipped.

Activity step rows without an end time or duration (fitbit, xiaomi) are
per-minute counts; they get a configurable one-minute span.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field, replace
from datetime import datetime, timedelta
from zoneinfo import ZoneInfo

from .model import (
    ItemKind,
    SleepStage,
    VendorKind,
    normalize_ts,
)


class UnknownFormatError(ValueError):
    """Header matches no registered vendor schema."""


class AmbiguousFormatError(ValueError):
    """Header matches schemas of more than one vendor."""


class SchemaError(ValueError):
    """File header does not match the expected vendor schema."""


class EncodingError(ValueError):
    """Byte stream does not decode in the configured encoding."""


class ParseError(ValueError):
    """A timestamp or value failed to parse; carries the source location."""


class UnknownStageError(ValueError):
    """Sleep-stage token or code has no mapping."""


class InvalidValueError(ValueError):
    """A value violates the standardized unit constraints."""


@dataclass(frozen=True)
class Diagnostic:
    file: str
    line: int
    code: str
    message: str

    def __str__(self) -> str:
        return f"{self.file}:{self.line}: {self.code}: {self.message}"


@dataclass
class RawRecord:
    """One vendor-parsed measurement or span before integration.

    Span items (steps, durations, sleep stages) have ``end`` present after
    parsing; point items (heart rate, SpO2) never do.
    """

    vendor: VendorKind
    item: ItemKind
    start: datetime
    end: datetime | None = None
    int_value: int | None = None
    float_value: float | None = None  # pre-normalization only (apple SpO2)
    stage: SleepStage | None = None
    source_line: str = ""


# Placeholder Samsung stage codes; vendor exports only guarantee an integer
# column, so real deployments must supply the true mapping in AdapterConfig.
DEFAULT_SAMSUNG_STAGE_CODES: dict[int, SleepStage] = {
    40001: SleepStage.awake,
    40002: SleepStage.light,
    40003: SleepStage.deep,
    40004: SleepStage.rem,
}

DEFAULT_STAGE_SYNONYMS: dict[str, SleepStage] = {
    "deep": SleepStage.deep,
    "light": SleepStage.light,
    "rem": SleepStage.rem,
    "awake": SleepStage.awake,
    "wake": SleepStage.awake,
}


@dataclass
class AdapterConfig:
    timezone: str = "Asia/Seoul"
    encoding: str = "utf-8"
    samsung_sleep_stage_codes: dict[int, SleepStage] = field(
        default_factory=lambda: dict(DEFAULT_SAMSUNG_STAGE_CODES)
    )
    stage_synonyms: dict[str, SleepStage] = field(
        default_factory=lambda: dict(DEFAULT_STAGE_SYNONYMS)
    )
    # Span length assumed for step rows lacking both end time and duration.
    per_minute_step_span_minutes: int = 1


# One CSV schema per (vendor, file kind). File kinds mirror the vendor
# export files: activity, exercise, heart_rate, oxygen_saturation, sleep,
# sleep_stage. Headers are globally unique so vendor detection is a lookup.
FILE_KINDS = (
    "activity",
    "exercise",
    "heart_rate",
    "oxygen_saturation",
    "sleep",
    "sleep_stage",
)

SCHEMAS: dict[tuple[VendorKind, str], tuple[str, ...]] = {
    (VendorKind.samsung, "activity"): ("start_time", "end_time", "step_count", "active_minutes"),
    (VendorKind.samsung, "exercise"): ("start_time", "end_time", "step_count", "exercise_minutes"),
    (VendorKind.samsung, "heart_rate"): ("start_time", "heart_rate"),
    (VendorKind.samsung, "oxygen_saturation"): ("start_time", "spo2"),
    (VendorKind.samsung, "sleep"): ("start_time", "end_time", "sleep_minutes"),
    (VendorKind.samsung, "sleep_stage"): ("start_time", "end_time", "stage_code"),
    (VendorKind.apple, "activity"): ("startDate", "endDate", "stepCount"),
    (VendorKind.apple, "exercise"): ("startDate", "endDate", "workoutType"),
    (VendorKind.apple, "heart_rate"): ("startDate", "heartRate"),
    (VendorKind.apple, "oxygen_saturation"): ("startDate", "oxygenSaturation"),
    (VendorKind.apple, "sleep"): ("startDate", "endDate"),
    (VendorKind.apple, "sleep_stage"): ("startDate", "endDate", "stage"),
    (VendorKind.fitbit, "activity"): ("Start Time", "Steps"),
    (VendorKind.fitbit, "exercise"): ("Start Time", "Steps", "Duration Minutes"),
    (VendorKind.fitbit, "heart_rate"): ("Start Time", "Heart Rate"),
    (VendorKind.fitbit, "oxygen_saturation"): ("Timestamp", "SpO2"),
    (VendorKind.fitbit, "sleep"): ("Timestamp", "Minutes Asleep"),
    (VendorKind.fitbit, "sleep_stage"): ("Timestamp", "Stage", "Stage Minutes"),
    (VendorKind.xiaomi, "activity"): ("date", "time", "steps"),
    (VendorKind.xiaomi, "exercise"): ("date", "time", "steps", "duration_min"),
    (VendorKind.xiaomi, "heart_rate"): ("date", "time", "heart_rate"),
    (VendorKind.xiaomi, "sleep"): ("date", "time", "sleep_minutes"),
    (VendorKind.xiaomi, "sleep_stage"): ("date", "stage", "total_minutes"),
}

_HEADER_INDEX: dict[tuple[str, ...], list[tuple[VendorKind, str]]] = {}
for (v, fk), cols in SCHEMAS.items():
    _HEADER_INDEX.setdefault(cols, []).append((v, fk))


def _split_header(header_line: str) -> tuple[str, ...]:
    return tuple(c.strip() for c in header_line.strip().split(","))


def detect_schema(header_line: str) -> tuple[VendorKind, str]:
    cols = _split_header(header_line)
    matches = _HEADER_INDEX.get(cols, [])
    vendors = {v for v, _ in matches}
    if not matches:
        raise UnknownFormatError(f"header matches no registered schema: {header_line!r}")
    if len(vendors) > 1:
        raise AmbiguousFormatError(
            f"header matches multiple vendors {sorted(v.value for v in vendors)}: "
            f"{header_line!r}"
        )
    return matches[0]


def detect_vendor(file_name: str, header_line: str) -> VendorKind:
    """Identify the vendor of an export file from its header row."""
    if not header_line.strip():
        raise UnknownFormatError(f"{file_name}: empty header")
    return detect_schema(header_line)[0]


def _fix_two_digit_year(dt: datetime) -> datetime:
    # strptime %y maps 69-99 to the 1900s; the exports are all 2000-2099.
    if dt.year < 2000:
        dt = dt.replace(year=dt.year + 100)
    return dt


def parse_timestamp(vendor: VendorKind, text: str, dataset_tz: str) -> datetime:
    """Parse a vendor timestamp into a naive local second-precision datetime.

    Offset-bearing inputs (apple) are converted into ``dataset_tz`` and then
    stored naive; milliseconds are truncated.
    """
    text = text.strip()
    try:
        if vendor is VendorKind.samsung:
            try:
                dt = datetime.strptime(text, "%Y-%m-%d %H:%M:%S.%f")
            except ValueError:
                dt = datetime.strptime(text, "%Y-%m-%d %H:%M:%S")
            return normalize_ts(dt)
        if vendor is VendorKind.apple:
            dt = datetime.strptime(text, "%Y-%m-%d %H:%M:%S %z")
            return normalize_ts(dt.astimezone(ZoneInfo(dataset_tz)))
        if vendor is VendorKind.fitbit:
            try:
                dt = datetime.strptime(text, "%m/%d/%y %H:%M:%S")
                return normalize_ts(_fix_two_digit_year(dt))
            except ValueError:
                try:
                    dt = datetime.strptime(text, "%Y-%m-%dT%H:%M:%S.%f")
                except ValueError:
                    dt = datetime.strptime(text, "%Y-%m-%dT%H:%M:%S")
                return normalize_ts(dt)
        if vendor is VendorKind.xiaomi:
            dt = datetime.strptime(text, "%Y-%m-%d %H:%M:%S")
            return normalize_ts(dt)
    except ValueError as exc:
        raise ParseError(f"bad {vendor.value} timestamp: {text!r}") from exc
    raise ParseError(f"no timestamp format for vendor {vendor!r}")


def map_sleep_stage(
    vendor: VendorKind, token: str | int, config: AdapterConfig
) -> SleepStage:
    """Resolve a vendor stage token/code to the canonical four-stage set."""
    if vendor is VendorKind.samsung:
        try:
            code = int(token)
        except (TypeError, ValueError):
            raise UnknownStageError(f"samsung stage code not an integer: {token!r}")
        stage = config.samsung_sleep_stage_codes.get(code)
        if stage is None:
            raise UnknownStageError(f"unmapped samsung stage code: {code}")
        return stage
    key = str(token).strip().lower()
    stage = config.stage_synonyms.get(key)
    if stage is None:
        raise UnknownStageError(f"unknown sleep stage token: {token!r}")
    return stage


def _int_field(text: str, what: str) -> int:
    try:
        return int(text.strip())
    except ValueError as exc:
        raise ParseError(f"bad integer {what}: {text!r}") from exc


def _float_field(text: str, what: str) -> float:
    try:
        return float(text.strip())
    except ValueError as exc:
        raise ParseError(f"bad number {what}: {text!r}") from exc


def round_half_away(x: float) -> int:
    return int(math.floor(x + 0.5)) if x >= 0 else int(math.ceil(x - 0.5))


def normalize_unit(record: RawRecord) -> RawRecord:
    """Standardize a parsed record's units and validate its value ranges.

    Durations keep their exact second-resolution spans (the minute value is
    derived at integration time); fractional SpO2 becomes an integer
    percent, rounded half away from zero.
    """
    rec = record
    if rec.item is ItemKind.oxygen_saturation and rec.float_value is not None:
        rec = replace(rec, int_value=round_half_away(rec.float_value), float_value=None)
    if rec.int_value is not None and rec.int_value < 0:
        raise InvalidValueError(
            f"negative {rec.item.value} value {rec.int_value} at {rec.source_line}"
        )
    if rec.item is ItemKind.oxygen_saturation and rec.int_value is not None:
        if not 0 <= rec.int_value <= 100:
            raise InvalidValueError(
                f"spo2 {rec.int_value} outside 0..100 at {rec.source_line}"
            )
    if rec.item is ItemKind.heart_rate and rec.int_value is not None:
        if rec.int_value <= 0:
            raise InvalidValueError(
                f"non-positive heart rate {rec.int_value} at {rec.source_line}"
            )
    return rec


def _parse_row(
    vendor: VendorKind,
    file_kind: str,
    row: list[str],
    config: AdapterConfig,
    where: str,
) -> list[RawRecord]:
    """Turn one CSV row into its RawRecords (a row may carry two items)."""
    cols = SCHEMAS[(vendor, file_kind)]
    if len(row) != len(cols):
        raise ParseError(f"expected {len(cols)} fields, got {len(row)}")
    tz = config.timezone

    def ts(text: str) -> datetime:
        return parse_timestamp(vendor, text, tz)

    if vendor is VendorKind.xiaomi and file_kind != "sleep_stage":
        start = ts(f"{row[0].strip()} {row[1].strip()}")
        rest = row[2:]
    elif vendor is VendorKind.xiaomi:
        raise _XiaomiDailyStage()
    else:
        start = ts(row[0])
        rest = row[1:]

    out: list[RawRecord] = []

    def add(item: ItemKind, **kw) -> None:
        out.append(RawRecord(vendor=vendor, item=item, start=start, source_line=where, **kw))

    if file_kind == "activity":
        if vendor is VendorKind.samsung:
            end = ts(rest[0])
            steps = _int_field(rest[1], "step count")
            add(ItemKind.steps, end=end, int_value=steps)
            add(ItemKind.activity_duration, end=end)
        elif vendor is VendorKind.apple:
            end = ts(rest[0])
            steps = _int_field(rest[1], "step count")
            add(ItemKind.steps, end=end, int_value=steps)
            add(ItemKind.activity_duration, end=end)
        else:  # fitbit, xiaomi: per-minute step rows, no end/duration
            steps = _int_field(rest[0], "step count")
            end = start + timedelta(minutes=config.per_minute_step_span_minutes)
            add(ItemKind.steps, end=end, int_value=steps)
    elif file_kind == "exercise":
        if vendor is VendorKind.samsung:
            end = ts(rest[0])
            steps = _int_field(rest[1], "step count")
            add(ItemKind.steps, end=end, int_value=steps)
            add(ItemKind.exercise_duration, end=end)
        elif vendor is VendorKind.apple:
            end = ts(rest[0])
            add(ItemKind.exercise_duration, end=end)
        else:  # fitbit, xiaomi: start + duration, steps
            steps = _int_field(rest[0], "step count")
            minutes = _int_field(rest[1], "duration")
            end = start + timedelta(minutes=minutes)
            add(ItemKind.steps, end=end, int_value=steps)
            add(ItemKind.exercise_duration, end=end)
    elif file_kind == "heart_rate":
        add(ItemKind.heart_rate, int_value=_int_field(rest[0], "heart rate"))
    elif file_kind == "oxygen_saturation":
        if vendor is VendorKind.apple:
            add(ItemKind.oxygen_saturation, float_value=_float_field(rest[0], "spo2"))
        else:
            add(ItemKind.oxygen_saturation, int_value=_int_field(rest[0], "spo2"))
    elif file_kind == "sleep":
        if vendor in (VendorKind.samsung, VendorKind.apple):
            end = ts(rest[0])
            add(ItemKind.sleep_duration, end=end)
        else:  # fitbit, xiaomi: start + duration
            minutes = _int_field(rest[0], "sleep minutes")
            end = start + timedelta(minutes=minutes)
            add(ItemKind.sleep_duration, end=end)
    elif file_kind == "sleep_stage":
        if vendor in (VendorKind.samsung, VendorKind.apple):
            end = ts(rest[0])
            stage = map_sleep_stage(vendor, rest[1], config)
            add(ItemKind.sleep_stage, end=end, stage=stage)
        elif vendor is VendorKind.fitbit:
            stage = map_sleep_stage(vendor, rest[0], config)
            minutes = _int_field(rest[1], "stage minutes")
            end = start + timedelta(minutes=minutes)
            add(ItemKind.sleep_stage, end=end, stage=stage)
    else:
        raise ParseError(f"unsupported file kind {file_kind!r}")

    for rec in out:
        if rec.end is not None and rec.end <= rec.start:
            raise ParseError(f"span end {rec.end} not after start {rec.start}")
    return out


class _XiaomiDailyStage(Exception):
    """Marker: daily-aggregated xiaomi stage row, reported and skipped."""


def parse_export(
    vendor: VendorKind,
    content: bytes,
    config: AdapterConfig,
    file_name: str = "<input>",
) -> tuple[list[RawRecord], list[Diagnostic]]:
    """Parse one vendor export file into normalized RawRecords.

    Malformed rows are skipped and reported as diagnostics, never silently
    dropped; duplicate identical rows collapse to one record with a
    diagnostic. Raises on header or encoding failure only.
    """
    try:
        text = content.decode(config.encoding)
    except UnicodeDecodeError as exc:
        raise EncodingError(f"{file_name}: not valid {config.encoding}") from exc

    lines = text.splitlines()
    if not lines:
        raise SchemaError(f"{file_name}: empty file")
    try:
        got_vendor, file_kind = detect_schema(lines[0])
    except UnknownFormatError as exc:
        raise SchemaError(f"{file_name}: {exc}") from exc
    if got_vendor is not vendor:
        raise SchemaError(
            f"{file_name}: header belongs to {got_vendor.value}, expected {vendor.value}"
        )
    if vendor is VendorKind.xiaomi and file_kind == "oxygen_saturation":
        raise SchemaError(f"{file_name}: xiaomi does not export oxygen saturation")

    records: list[RawRecord] = []
    diagnostics: list[Diagnostic] = []
    seen: dict[tuple[str, ...], int] = {}
    for lineno, row in enumerate(csv.reader(io.StringIO("\n".join(lines[1:]))), start=2):
        if not row or all(not c.strip() for c in row):
            continue
        key = tuple(row)
        if key in seen:
            seen[key] += 1
            diagnostics.append(
                Diagnostic(file_name, lineno, "duplicate-row",
                           f"identical to earlier row (seen {seen[key]}x)")
            )
            continue
        seen[key] = 1
        where = f"{file_name}:{lineno}"
        try:
            for rec in _parse_row(vendor, file_kind, row, config, where):
                records.append(normalize_unit(rec))
        except _XiaomiDailyStage:
            diagnostics.append(
                Diagnostic(file_name, lineno, "daily-aggregate",
                           "xiaomi sleep-stage rows are daily aggregates; "
                           "not assignable to windows, skipped")
            )
        except (ParseError, UnknownStageError, InvalidValueError) as exc:
            diagnostics.append(Diagnostic(file_name, lineno, "bad-row", str(exc)))
    return records, diagnostics


# --- Rendering (inverse of parse, for fixtures and round-trip checks) ----


def _render_timestamp(vendor: VendorKind, ts: datetime, dataset_tz: str, iso: bool) -> str:
    if vendor is VendorKind.samsung:
        return ts.strftime("%Y-%m-%d %H:%M:%S") + ".000"
    if vendor is VendorKind.apple:
        offset = ZoneInfo(dataset_tz).utcoffset(ts)
        total = int(offset.total_seconds()) if offset else 0
        sign = "+" if total >= 0 else "-"
        total = abs(total)
        return ts.strftime("%Y-%m-%d %H:%M:%S") + f" {sign}{total // 3600:02d}{total % 3600 // 60:02d}"
    if vendor is VendorKind.fitbit:
        if iso:
            return ts.strftime("%Y-%m-%dT%H:%M:%S") + ".000"
        return ts.strftime("%m/%d/%y %H:%M:%S")
    return ts.strftime("%Y-%m-%d %H:%M:%S")  # xiaomi joined form (split by caller)


def render_export(
    vendor: VendorKind,
    file_kind: str,
    records: list[RawRecord],
    config: AdapterConfig,
) -> str:
    """Render RawRecords back into the vendor's file schema.

    Records must all belong to the given (vendor, file_kind); rows that
    parse into two records (steps + duration) are regrouped by span.
    """
    cols = SCHEMAS[(vendor, file_kind)]
    lines = [",".join(cols)]
    iso = vendor is VendorKind.fitbit and file_kind in ("oxygen_saturation", "sleep", "sleep_stage")

    def ts(t: datetime) -> str:
        return _render_timestamp(vendor, t, config.timezone, iso)

    def xdt(t: datetime) -> list[str]:
        return [t.strftime("%Y-%m-%d"), t.strftime("%H:%M:%S")]

    stage_code_rev = {v: k for k, v in config.samsung_sleep_stage_codes.items()}

    if file_kind in ("activity", "exercise"):
        by_span: dict[tuple[datetime, datetime], dict[ItemKind, RawRecord]] = {}
        order: list[tuple[datetime, datetime]] = []
        for rec in records:
            key = (rec.start, rec.end)
            if key not in by_span:
                by_span[key] = {}
                order.append(key)
            by_span[key][rec.item] = rec
        for start, end in order:
            group = by_span[(start, end)]
            steps = group.get(ItemKind.steps)
            minutes = int(round((end - start).total_seconds() / 60))
            if vendor is VendorKind.samsung:
                n = str(steps.int_value if steps else 0)
                lines.append(",".join([ts(start), ts(end), n, str(minutes)]))
            elif vendor is VendorKind.apple:
                if file_kind == "activity":
                    lines.append(",".join([ts(start), ts(end), str(steps.int_value if steps else 0)]))
                else:
                    lines.append(",".join([ts(start), ts(end), "workout"]))
            elif vendor is VendorKind.fitbit:
                if file_kind == "activity":
                    lines.append(",".join([ts(start), str(steps.int_value if steps else 0)]))
                else:
                    lines.append(",".join([ts(start), str(steps.int_value if steps else 0), str(minutes)]))
            else:  # xiaomi
                if file_kind == "activity":
                    lines.append(",".join(xdt(start) + [str(steps.int_value if steps else 0)]))
                else:
                    lines.append(",".join(xdt(start) + [str(steps.int_value if steps else 0), str(minutes)]))
    else:
        for rec in records:
            if file_kind in ("heart_rate", "oxygen_saturation"):
                value = str(rec.int_value)
                if vendor is VendorKind.apple and file_kind == "oxygen_saturation":
                    value = f"{float(rec.int_value):.1f}"
                if vendor is VendorKind.xiaomi:
                    lines.append(",".join(xdt(rec.start) + [value]))
                else:
                    lines.append(",".join([ts(rec.start), value]))
            elif file_kind == "sleep":
                minutes = int(round((rec.end - rec.start).total_seconds() / 60))
                if vendor in (VendorKind.samsung,):
                    lines.append(",".join([ts(rec.start), ts(rec.end), str(minutes)]))
                elif vendor is VendorKind.apple:
                    lines.append(",".join([ts(rec.start), ts(rec.end)]))
                elif vendor is VendorKind.fitbit:
                    lines.append(",".join([ts(rec.start), str(minutes)]))
                else:
                    lines.append(",".join(xdt(rec.start) + [str(minutes)]))
            elif file_kind == "sleep_stage":
                minutes = int(round((rec.end - rec.start).total_seconds() / 60))
                if vendor is VendorKind.samsung:
                    code = stage_code_rev[rec.stage]
                    lines.append(",".join([ts(rec.start), ts(rec.end), str(code)]))
                elif vendor is VendorKind.apple:
                    lines.append(",".join([ts(rec.start), ts(rec.end), rec.stage.value]))
                elif vendor is VendorKind.fitbit:
                    lines.append(",".join([ts(rec.start), rec.stage.value, str(minutes)]))
                else:
                    raise ValueError("xiaomi sleep-stage rendering unsupported (daily aggregate)")
            else:
                raise ValueError(f"unsupported file kind {file_kind!r}")
    return "\n".join(lines) + "\n"

"""Canonical time grid, item vocabulary, and standardized dataset types.

Everything downstream (adapters, integration, quality, export) produces or
consumes these types. Timestamps are naive local datetimes at second
precision in one dataset-level reference timezone; the canonical text form
is ``YYYY-MM-DD HH:MM:SS``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date, datetime, timedelta
from enum import Enum

TS_FORMAT = "%Y-%m-%d %H:%M:%S"

_EPOCH = datetime(2000, 1, 1)


class ItemKind(str, Enum):
    steps = "steps"
    activity_duration = "activity_duration"
    exercise_duration = "exercise_duration"
    heart_rate = "heart_rate"
    oxygen_saturation = "oxygen_saturation"
    sleep_duration = "sleep_duration"
    sleep_stage = "sleep_stage"


class SleepStage(str, Enum):
    deep = "deep"
    light = "light"
    rem = "rem"
    awake = "awake"


class VendorKind(str, Enum):
    samsung = "samsung"
    apple = "apple"
    fitbit = "fitbit"
    xiaomi = "xiaomi"


#: Items that carry span semantics (a start/end interval).
SPAN_ITEMS = frozenset(
    {
        ItemKind.steps,
        ItemKind.activity_duration,
        ItemKind.exercise_duration,
        ItemKind.sleep_duration,
        ItemKind.sleep_stage,
    }
)

#: Items that carry point semantics (a single sample instant).
POINT_ITEMS = frozenset({ItemKind.heart_rate, ItemKind.oxygen_saturation})


class TimestampError(ValueError):
    """Text does not parse as a canonical timestamp."""


class DegenerateSpanError(ValueError):
    """A span with end <= start was given where a positive span is required."""


class GridError(ValueError):
    """Interval length does not evenly divide a day."""


def parse_ts(text: str) -> datetime:
    """Parse the canonical ``YYYY-MM-DD HH:MM:SS`` form."""
    try:
        ts = datetime.strptime(text, TS_FORMAT)
    except ValueError as exc:
        raise TimestampError(f"not a canonical timestamp: {text!r}") from exc
    # strptime is lenient about zero padding; the canonical form is not
    if ts.strftime(TS_FORMAT) != text:
        raise TimestampError(f"not a canonical timestamp: {text!r}")
    return ts


def format_ts(ts: datetime) -> str:
    return ts.strftime(TS_FORMAT)


def normalize_ts(ts: datetime) -> datetime:
    """Drop sub-second components and any tzinfo; keep second precision."""
    return ts.replace(microsecond=0, tzinfo=None)


def to_epoch_seconds(ts: datetime) -> int:
    return int((ts - _EPOCH).total_seconds())


def from_epoch_seconds(sec: int) -> datetime:
    return _EPOCH + timedelta(seconds=sec)


@dataclass(frozen=True)
class WindowGrid:
    """Fixed-interval grid over absolute wall-clock time.

    Windows are half-open ``[k*interval, (k+1)*interval)``; a sample at an
    exact boundary belongs to the later window.
    """

    interval_minutes: int = 10

    def __post_init__(self) -> None:
        if self.interval_minutes <= 0 or 1440 % self.interval_minutes != 0:
            raise GridError(
                f"interval must be a positive divisor of 1440 minutes, "
                f"got {self.interval_minutes}"
            )

    @property
    def windows_per_day(self) -> int:
        return 1440 // self.interval_minutes

    @property
    def interval_seconds(self) -> int:
        return self.interval_minutes * 60


def align_to_window(ts: datetime, grid: WindowGrid) -> datetime:
    """Floor a timestamp to the start of its grid window."""
    sec = to_epoch_seconds(ts)
    return from_epoch_seconds(sec - sec % grid.interval_seconds)


def overlap_decomposition(
    start: datetime, end: datetime, grid: WindowGrid
) -> list[tuple[datetime, int]]:
    """Split [start, end) into per-window overlaps.

    Returns (window_start, overlap_seconds) in ascending window order. The
    overlaps partition the span: they are pairwise disjoint and sum exactly
    to the span length in seconds. Spans crossing midnight decompose across
    days naturally (the grid is absolute wall-clock).
    """
    if end <= start:
        raise DegenerateSpanError(f"degenerate span: [{start}, {end})")
    s = to_epoch_seconds(start)
    e = to_epoch_seconds(end)
    step = grid.interval_seconds
    w = s - s % step
    out: list[tuple[datetime, int]] = []
    while w < e:
        lo = max(s, w)
        hi = min(e, w + step)
        out.append((from_epoch_seconds(w), hi - lo))
        w += step
    return out


# Frame field carried by each item kind.
ITEM_FIELDS: dict[ItemKind, str] = {
    ItemKind.steps: "steps",
    ItemKind.activity_duration: "activity_minutes",
    ItemKind.exercise_duration: "exercise_minutes",
    ItemKind.heart_rate: "heart_rate_bpm",
    ItemKind.oxygen_saturation: "spo2_percent",
    ItemKind.sleep_duration: "sleep_minutes",
    ItemKind.sleep_stage: "sleep_stage",
}


@dataclass
class CanonicalFrame:
    """One integrated row of the fixed-interval grid.

    Absent (None) is distinct from zero everywhere: ``steps is None`` means
    "not measured", ``steps == 0`` means "measured zero".
    """

    window_start: datetime
    steps: int | None = None
    activity_minutes: int | None = None
    exercise_minutes: int | None = None
    heart_rate_bpm: int | None = None
    spo2_percent: int | None = None
    sleep_minutes: int | None = None
    sleep_stage: SleepStage | None = None
    sources: dict[ItemKind, VendorKind] = field(default_factory=dict)
    sample_counts: dict[ItemKind, int] = field(default_factory=dict)

    def present_items(self) -> list[ItemKind]:
        return [k for k, f in ITEM_FIELDS.items() if getattr(self, f) is not None]

    def is_empty(self) -> bool:
        return not self.present_items()

    def validate(self, grid: WindowGrid) -> None:
        if to_epoch_seconds(self.window_start) % grid.interval_seconds != 0:
            raise ValueError(f"window_start not grid-aligned: {self.window_start}")
        for name in ("activity_minutes", "exercise_minutes", "sleep_minutes"):
            v = getattr(self, name)
            if v is not None and not 0 <= v <= grid.interval_minutes:
                raise ValueError(f"{name}={v} outside 0..{grid.interval_minutes}")
        if self.steps is not None and self.steps < 0:
            raise ValueError(f"negative steps: {self.steps}")
        if self.heart_rate_bpm is not None and self.heart_rate_bpm <= 0:
            raise ValueError(f"non-positive heart rate: {self.heart_rate_bpm}")
        if self.spo2_percent is not None and not 0 <= self.spo2_percent <= 100:
            raise ValueError(f"spo2 outside 0..100: {self.spo2_percent}")
        if self.sleep_stage is not None and not (self.sleep_minutes or 0) > 0:
            raise ValueError("sleep_stage present without positive sleep_minutes")
        present = set(self.present_items())
        if set(self.sources) != present:
            raise ValueError(
                f"sources {sorted(self.sources)} do not match present items "
                f"{sorted(present)}"
            )


@dataclass
class Dataset:
    """Ordered, integrated fixed-interval frames plus provenance."""

    dataset_id: str
    timezone: str
    grid: WindowGrid
    frames: list[CanonicalFrame] = field(default_factory=list)

    @property
    def collection_span(self) -> tuple[date, date] | None:
        """(first, last) calendar dates with any data; None when empty."""
        if not self.frames:
            return None
        return (self.frames[0].window_start.date(), self.frames[-1].window_start.date())

    def dates(self) -> list[date]:
        """All calendar dates in the collection span, inclusive."""
        span = self.collection_span
        if span is None:
            return []
        first, last = span
        return [first + timedelta(days=i) for i in range((last - first).days + 1)]

    def validate(self) -> None:
        prev = None
        for f in self.frames:
            f.validate(self.grid)
            if f.is_empty():
                raise ValueError(f"empty frame materialized at {f.window_start}")
            if prev is not None and f.window_start <= prev:
                raise ValueError(f"frames not strictly ascending at {f.window_start}")
            prev = f.window_start


@dataclass
class DailySummary:
    """Daily rollup of one calendar date's frames."""

    date: date
    total_steps: int = 0
    total_sleep_minutes: int = 0
    total_activity_minutes: int = 0
    total_exercise_minutes: int = 0
    mean_heart_rate_bpm: int | None = None
    mean_spo2_percent: int | None = None
    wear_minutes: int = 0
    nonempty_windows: int = 0

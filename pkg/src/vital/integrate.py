"""Fixed-interval integration of normalized records into a Dataset.

Three aggregation rules, by item class:

1. quantities from sub-window records are summed within a window;
2. spans longer than a window are divided across the windows they overlap,
   proportionally by overlap, with integer conservation via the
   largest-remainder method;
3. biometric point samples (heart rate, SpO2) are averaged within a window,
   rounded half away from zero.

Integration is a pure function of the record multiset: results never depend
on input order. Multi-vendor overlap is resolved per item by a vendor
priority list, never by cross-vendor summing (avoids double-counted steps).
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from datetime import date, datetime, timedelta

from .adapters import RawRecord, round_half_away
from .model import (
    POINT_ITEMS,
    CanonicalFrame,
    DailySummary,
    Dataset,
    ItemKind,
    SleepStage,
    VendorKind,
    WindowGrid,
    from_epoch_seconds,
    overlap_decomposition,
    to_epoch_seconds,
)


class ConsistencyError(ValueError):
    """Internal aggregation precondition violated."""


class EmptyDatasetError(ValueError):
    """No records survived parsing; nothing to integrate."""


@dataclass(frozen=True)
class Allocation:
    window_start: datetime
    item: ItemKind
    amount: int  # steps, or seconds for durations
    vendor: VendorKind
    origin: RawRecord


@dataclass(frozen=True)
class MergePolicy:
    """Vendor priority for per-item conflict resolution (first wins)."""

    vendor_priority: tuple[VendorKind, ...] = (
        VendorKind.samsung,
        VendorKind.apple,
        VendorKind.fitbit,
        VendorKind.xiaomi,
    )
    per_item_priority: dict[ItemKind, tuple[VendorKind, ...]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if len(set(self.vendor_priority)) != len(self.vendor_priority):
            raise ValueError("vendor priority contains duplicates")

    def priority_for(self, item: ItemKind) -> tuple[VendorKind, ...]:
        return self.per_item_priority.get(item, self.vendor_priority)


def largest_remainder(total: int, weights: list[int]) -> list[int]:
    """Apportion a non-negative integer total across weights.

    Floors the proportional shares and hands the leftover units to the
    largest fractional remainders (ties go to the earlier position), so the
    parts always sum exactly to the total.
    """
    if total < 0:
        raise ConsistencyError(f"negative total: {total}")
    wsum = sum(weights)
    if wsum <= 0 or any(w <= 0 for w in weights):
        raise ConsistencyError(f"weights must be positive: {weights}")
    floors = [total * w // wsum for w in weights]
    leftover = total - sum(floors)
    if leftover:
        remainders = sorted(
            range(len(weights)),
            key=lambda i: (-(total * weights[i] % wsum), i),
        )
        for i in remainders[:leftover]:
            floors[i] += 1
    return floors


def allocate_span_quantity(
    record: RawRecord, decomposition: list[tuple[datetime, int]]
) -> list[Allocation]:
    """Divide a span record's quantity across its overlapped windows.

    Counted quantities (steps) split proportionally by overlap seconds with
    exact conservation; duration-type records allocate the overlap seconds
    themselves (exact by construction).
    """
    if record.end is None:
        raise ConsistencyError(f"record has no span: {record}")
    span = int((record.end - record.start).total_seconds())
    if sum(sec for _, sec in decomposition) != span:
        raise ConsistencyError("decomposition is not a partition of the record span")
    if record.item is ItemKind.steps:
        seconds = [sec for _, sec in decomposition]
        parts = largest_remainder(record.int_value or 0, seconds)
        return [
            Allocation(w, record.item, n, record.vendor, record)
            for (w, _), n in zip(decomposition, parts)
        ]
    return [
        Allocation(w, record.item, sec, record.vendor, record)
        for w, sec in decomposition
    ]


def sum_short_records(allocations: list[Allocation]) -> int:
    """Sum same-window, same-item, same-vendor allocations."""
    keys = {(a.window_start, a.item, a.vendor) for a in allocations}
    if len(keys) > 1:
        raise ConsistencyError(f"mixed allocation keys: {keys}")
    return sum(a.amount for a in allocations)


def average_biometric(samples: list[int]) -> tuple[int, int] | None:
    """Mean of point samples in one window, rounded half away from zero.

    Returns (value, sample_count), or None for an empty window (absent is
    distinct from zero).
    """
    if not samples:
        return None
    return round_half_away(sum(samples) / len(samples)), len(samples)


_STAGE_PRECEDENCE = (SleepStage.deep, SleepStage.rem, SleepStage.light, SleepStage.awake)


def dominant_sleep_stage(
    stage_seconds: dict[SleepStage, int]
) -> tuple[SleepStage, int] | None:
    """Pick the stage covering the most of a window; ties prefer deep > rem
    > light > awake. Returns (stage, total seconds over all stages present),
    or None when the window has no stage data."""
    present = {s: sec for s, sec in stage_seconds.items() if sec > 0}
    if not present:
        return None
    # max keeps the first maximal element, so precedence order breaks ties
    best = max(_STAGE_PRECEDENCE, key=lambda s: present.get(s, 0))
    total = sum(present.values())
    return best, total


@dataclass
class VendorFrames:
    """Per-vendor pre-merge window values for one integration run."""

    steps: dict[int, int] = field(default_factory=dict)
    activity_min: dict[int, int] = field(default_factory=dict)
    exercise_min: dict[int, int] = field(default_factory=dict)
    sleep_min_stage: dict[int, int] = field(default_factory=dict)
    sleep_min_plain: dict[int, int] = field(default_factory=dict)
    stage_seconds: dict[int, dict[SleepStage, int]] = field(default_factory=dict)
    hr_samples: dict[int, list[int]] = field(default_factory=dict)
    spo2_samples: dict[int, list[int]] = field(default_factory=dict)


def _record_sort_key(rec: RawRecord):
    return (
        rec.start,
        rec.end or rec.start,
        rec.item.value,
        rec.vendor.value,
        rec.int_value if rec.int_value is not None else -1,
        rec.stage.value if rec.stage else "",
        rec.source_line,
    )


def _span_minutes(total_seconds: int) -> int:
    return (total_seconds + 30) // 60  # round half away (spans are positive)


def integrate_per_vendor(
    records: list[RawRecord], grid: WindowGrid
) -> dict[VendorKind, VendorFrames]:
    """Decompose, allocate, and aggregate records into per-vendor windows.

    Duration seconds convert to integer minutes by largest remainder per
    origin record, so each record's total minutes are conserved exactly.
    """
    step = grid.interval_seconds
    by_vendor: dict[VendorKind, VendorFrames] = defaultdict(VendorFrames)

    for rec in sorted(records, key=_record_sort_key):
        vf = by_vendor[rec.vendor]
        s = to_epoch_seconds(rec.start)
        if rec.item in POINT_ITEMS:
            w = s - s % step
            target = vf.hr_samples if rec.item is ItemKind.heart_rate else vf.spo2_samples
            target.setdefault(w, []).append(rec.int_value)
            continue

        if rec.end is None:
            raise ConsistencyError(f"span record without end: {rec}")
        e = to_epoch_seconds(rec.end)
        # inline decomposition on epoch seconds (hot path)
        w0 = s - s % step
        windows: list[int] = []
        overlaps: list[int] = []
        w = w0
        while w < e:
            windows.append(w)
            overlaps.append(min(e, w + step) - max(s, w))
            w += step

        if rec.item is ItemKind.steps:
            for w, n in zip(windows, largest_remainder(rec.int_value or 0, overlaps)):
                vf.steps[w] = vf.steps.get(w, 0) + n
            continue

        minutes = largest_remainder(_span_minutes(e - s), overlaps)
        if rec.item is ItemKind.activity_duration:
            dest = vf.activity_min
        elif rec.item is ItemKind.exercise_duration:
            dest = vf.exercise_min
        elif rec.item is ItemKind.sleep_duration:
            dest = vf.sleep_min_plain
        elif rec.item is ItemKind.sleep_stage:
            dest = vf.sleep_min_stage
            for w, sec in zip(windows, overlaps):
                stages = vf.stage_seconds.setdefault(w, {})
                stages[rec.stage] = stages.get(rec.stage, 0) + sec
        else:
            raise ConsistencyError(f"unexpected span item: {rec.item}")
        for w, m in zip(windows, minutes):
            if m:
                dest[w] = dest.get(w, 0) + m
            elif rec.item is not ItemKind.sleep_stage:
                dest.setdefault(w, 0)
    return dict(by_vendor)


def _vendor_frame(vf: VendorFrames, w: int, grid: WindowGrid, vendor: VendorKind) -> CanonicalFrame:
    """Materialize one vendor's window into a (pre-merge) frame."""
    cap = grid.interval_minutes
    frame = CanonicalFrame(window_start=from_epoch_seconds(w))
    if w in vf.steps:
        frame.steps = vf.steps[w]
        frame.sources[ItemKind.steps] = vendor
    if w in vf.activity_min:
        frame.activity_minutes = min(vf.activity_min[w], cap)
        frame.sources[ItemKind.activity_duration] = vendor
    if w in vf.exercise_min:
        frame.exercise_minutes = min(vf.exercise_min[w], cap)
        frame.sources[ItemKind.exercise_duration] = vendor
    stages = vf.stage_seconds.get(w)
    dominant = dominant_sleep_stage(stages) if stages else None
    if dominant is not None:
        stage, _total = dominant
        minutes = min(vf.sleep_min_stage.get(w, 0), cap)
        if minutes > 0:
            frame.sleep_stage = stage
            frame.sleep_minutes = minutes
            frame.sources[ItemKind.sleep_stage] = vendor
            frame.sources[ItemKind.sleep_duration] = vendor
        elif w in vf.sleep_min_plain:
            frame.sleep_minutes = min(vf.sleep_min_plain[w], cap)
            frame.sources[ItemKind.sleep_duration] = vendor
    elif w in vf.sleep_min_plain:
        frame.sleep_minutes = min(vf.sleep_min_plain[w], cap)
        frame.sources[ItemKind.sleep_duration] = vendor
    hr = average_biometric(vf.hr_samples.get(w, []))
    if hr is not None:
        frame.heart_rate_bpm, n = hr
        frame.sources[ItemKind.heart_rate] = vendor
        frame.sample_counts[ItemKind.heart_rate] = n
    spo2 = average_biometric(vf.spo2_samples.get(w, []))
    if spo2 is not None:
        frame.spo2_percent, n = spo2
        frame.sources[ItemKind.oxygen_saturation] = vendor
        frame.sample_counts[ItemKind.oxygen_saturation] = n
    return frame


_FRAME_FIELD_ITEMS: list[tuple[str, ItemKind]] = [
    ("steps", ItemKind.steps),
    ("activity_minutes", ItemKind.activity_duration),
    ("exercise_minutes", ItemKind.exercise_duration),
    ("heart_rate_bpm", ItemKind.heart_rate),
    ("spo2_percent", ItemKind.oxygen_saturation),
]


@dataclass(frozen=True)
class Conflict:
    window_start: datetime
    item: ItemKind
    kept_vendor: VendorKind
    losing: tuple[tuple[VendorKind, object], ...]


def merge_sources(
    per_vendor: dict[VendorKind, CanonicalFrame],
    policy: MergePolicy,
    conflicts: list[Conflict] | None = None,
) -> CanonicalFrame:
    """Merge one window's vendor frames: per item, highest priority wins."""
    if not per_vendor:
        raise ConsistencyError("merge of zero vendor frames")
    window = next(iter(per_vendor.values())).window_start
    out = CanonicalFrame(window_start=window)

    def pick(item: ItemKind, getter, setter) -> None:
        ranked = [v for v in policy.priority_for(item) if v in per_vendor]
        holders = [(v, getter(per_vendor[v])) for v in ranked]
        holders = [(v, val) for v, val in holders if val is not None]
        if not holders:
            return
        winner, value = holders[0]
        setter(out, value)
        out.sources[item] = winner
        if len(holders) > 1 and conflicts is not None:
            conflicts.append(Conflict(window, item, winner, tuple(holders[1:])))

    for attr, item in _FRAME_FIELD_ITEMS:
        pick(item, lambda f, a=attr: getattr(f, a), lambda f, v, a=attr: setattr(f, a, v))
    # Sleep minutes and stage travel together from the winning vendor so the
    # stage-implies-minutes invariant survives the merge.
    ranked = [v for v in policy.priority_for(ItemKind.sleep_duration) if v in per_vendor]
    sleepers = [(v, per_vendor[v]) for v in ranked if per_vendor[v].sleep_minutes is not None]
    if sleepers:
        winner, vf = sleepers[0]
        out.sleep_minutes = vf.sleep_minutes
        out.sleep_stage = vf.sleep_stage
        out.sources[ItemKind.sleep_duration] = winner
        if vf.sleep_stage is not None:
            out.sources[ItemKind.sleep_stage] = winner
        if len(sleepers) > 1 and conflicts is not None:
            conflicts.append(
                Conflict(window, ItemKind.sleep_duration, winner,
                         tuple((v, f.sleep_minutes) for v, f in sleepers[1:]))
            )
    for item in (ItemKind.heart_rate, ItemKind.oxygen_saturation):
        vendor = out.sources.get(item)
        if vendor is not None:
            n = per_vendor[vendor].sample_counts.get(item)
            if n is not None:
                out.sample_counts[item] = n
    return out


def integrate(
    records: list[RawRecord],
    grid: WindowGrid,
    policy: MergePolicy | None = None,
    dataset_id: str = "dataset",
    timezone: str = "Asia/Seoul",
    conflicts: list[Conflict] | None = None,
) -> Dataset:
    """Run the full integration pipeline on normalized records.

    Deterministic regardless of input order; frames are emitted only for
    windows with at least one present item.
    """
    if not records:
        raise EmptyDatasetError("no records to integrate")
    policy = policy or MergePolicy()
    per_vendor = integrate_per_vendor(records, grid)

    windows: set[int] = set()
    for vf in per_vendor.values():
        for d in (vf.steps, vf.activity_min, vf.exercise_min, vf.sleep_min_plain,
                  vf.sleep_min_stage, vf.hr_samples, vf.spo2_samples):
            windows.update(d.keys())

    frames: list[CanonicalFrame] = []
    for w in sorted(windows):
        vframes = {
            vendor: _vendor_frame(vf, w, grid, vendor)
            for vendor, vf in per_vendor.items()
        }
        vframes = {v: f for v, f in vframes.items() if not f.is_empty()}
        if not vframes:
            continue
        merged = merge_sources(vframes, policy, conflicts)
        if not merged.is_empty():
            frames.append(merged)
    ds = Dataset(dataset_id=dataset_id, timezone=timezone, grid=grid, frames=frames)
    ds.validate()
    return ds


def vendor_window_frames(
    records: list[RawRecord], grid: WindowGrid
) -> dict[VendorKind, list[CanonicalFrame]]:
    """Pre-merge frames per vendor (used by conservation checks)."""
    out: dict[VendorKind, list[CanonicalFrame]] = {}
    for vendor, vf in integrate_per_vendor(records, grid).items():
        windows: set[int] = set()
        for d in (vf.steps, vf.activity_min, vf.exercise_min, vf.sleep_min_plain,
                  vf.sleep_min_stage, vf.hr_samples, vf.spo2_samples):
            windows.update(d.keys())
        out[vendor] = [
            f for f in (_vendor_frame(vf, w, grid, vendor) for w in sorted(windows))
            if not f.is_empty()
        ]
    return out


def daily_rollup(dataset: Dataset) -> list[DailySummary]:
    """One summary per calendar date in the collection span, inclusive.

    Dates with no data yield zeroed summaries. Mean heart rate and SpO2 are
    weighted by per-frame sample counts.
    """
    by_date: dict[date, list[CanonicalFrame]] = defaultdict(list)
    for f in dataset.frames:
        by_date[f.window_start.date()].append(f)

    out: list[DailySummary] = []
    for d in dataset.dates():
        frames = by_date.get(d, [])
        summary = DailySummary(date=d)
        hr_sum = hr_n = spo2_sum = spo2_n = 0
        for f in frames:
            summary.total_steps += f.steps or 0
            summary.total_sleep_minutes += f.sleep_minutes or 0
            summary.total_activity_minutes += f.activity_minutes or 0
            summary.total_exercise_minutes += f.exercise_minutes or 0
            if f.heart_rate_bpm is not None:
                n = f.sample_counts.get(ItemKind.heart_rate, 1)
                hr_sum += f.heart_rate_bpm * n
                hr_n += n
            if f.spo2_percent is not None:
                n = f.sample_counts.get(ItemKind.oxygen_saturation, 1)
                spo2_sum += f.spo2_percent * n
                spo2_n += n
        summary.nonempty_windows = len(frames)
        summary.wear_minutes = len(frames) * dataset.grid.interval_minutes
        if hr_n:
            summary.mean_heart_rate_bpm = round_half_away(hr_sum / hr_n)
        if spo2_n:
            summary.mean_spo2_percent = round_half_away(spo2_sum / spo2_n)
        out.append(summary)
    return out

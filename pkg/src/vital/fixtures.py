"""Deterministic scenario builders for tests, demos, and documentation.

The raw vendor export schemas are not published by the device makers in a
reusable form, so this module is also the reference corpus: every file it
writes documents one vendor/item schema bit-exactly.
"""
from __future__ import annotations

from datetime import date, datetime, timedelta
from pathlib import Path

from .adapters import AdapterConfig, RawRecord, render_export
from .model import ItemKind, SleepStage, VendorKind

DEFAULT_TZ = "Asia/Seoul"


def _rec(vendor, item, start, end=None, value=None, stage=None) -> RawRecord:
    return RawRecord(vendor=vendor, item=item, start=start, end=end,
                     int_value=value, stage=stage)


def aggregation_example_records() -> list[RawRecord]:
    """All three aggregation rules in one small record set.

    Rule 1: two short step records inside the 08:00 window, summed.
    Rule 2: a 30-minute activity span 10:05-10:35 with 300 steps, divided
    across four windows.
    Rule 3: two heart-rate samples in the 09:00 window, averaged.
    """
    day = datetime(2024, 3, 15)
    v = VendorKind.samsung
    return [
        _rec(v, ItemKind.steps, day.replace(hour=8, minute=1),
             day.replace(hour=8, minute=3), 120),
        _rec(v, ItemKind.steps, day.replace(hour=8, minute=5),
             day.replace(hour=8, minute=7), 80),
        _rec(v, ItemKind.steps, day.replace(hour=10, minute=5),
             day.replace(hour=10, minute=35), 300),
        _rec(v, ItemKind.activity_duration, day.replace(hour=10, minute=5),
             day.replace(hour=10, minute=35)),
        _rec(v, ItemKind.heart_rate, day.replace(hour=9, minute=2), value=72),
        _rec(v, ItemKind.heart_rate, day.replace(hour=9, minute=8), value=78),
    ]


def wear_scenario_records(first_day: date = date(2024, 3, 1)) -> list[RawRecord]:
    """Three days with wear time 17 h, 18 h, and 19 h (10-minute grid).

    Wear comes from one heart-rate sample per worn window; each day also
    carries a fixed 1000-step hour so step filters have something to bite.
    """
    records: list[RawRecord] = []
    v = VendorKind.fitbit
    for day_idx, hours in enumerate((17, 18, 19)):
        day = datetime.combine(first_day + timedelta(days=day_idx), datetime.min.time())
        for k in range(hours * 6):  # 6 ten-minute windows per hour
            records.append(
                _rec(v, ItemKind.heart_rate, day + timedelta(minutes=10 * k, seconds=30),
                     value=60 + k % 30)
            )
        records.append(
            _rec(v, ItemKind.steps, day.replace(hour=12),
                 day.replace(hour=13), 1000)
        )
    return records


STUDY_DAYS = 19
STUDY_MEAN_STEPS = 15466
STUDY_SLEEP_MINUTES = 240


def study_daily_steps() -> list[int]:
    """19 daily totals averaging exactly 15,466 (deltas sum to zero)."""
    return [STUDY_MEAN_STEPS + (i - 9) * 100 for i in range(STUDY_DAYS)]


def study_period_records(first_day: date = date(2024, 4, 1)) -> list[RawRecord]:
    """19-day corpus: exact daily step totals and 4 h of sleep per day."""
    records: list[RawRecord] = []
    v = VendorKind.samsung
    for i, total in enumerate(study_daily_steps()):
        day = datetime.combine(first_day + timedelta(days=i), datetime.min.time())
        # Steps spread over three daytime spans that sum to the daily total.
        thirds = [total // 3, total // 3, total - 2 * (total // 3)]
        for j, n in enumerate(thirds):
            start = day.replace(hour=8 + 4 * j)
            records.append(_rec(v, ItemKind.steps, start, start + timedelta(hours=1), n))
        # 4 hours of sleep, 00:30-04:30, with a stage pattern.
        sleep_start = day.replace(minute=30)
        records.append(
            _rec(v, ItemKind.sleep_duration, sleep_start, sleep_start + timedelta(hours=4))
        )
        for k, stage in enumerate(
            (SleepStage.light, SleepStage.deep, SleepStage.rem, SleepStage.light)
        ):
            s = sleep_start + timedelta(hours=k)
            records.append(
                _rec(v, ItemKind.sleep_stage, s, s + timedelta(hours=1), stage=stage)
            )
        # Hourly daytime heart rate so quality metrics have biometrics.
        for h in range(8, 20):
            records.append(
                _rec(v, ItemKind.heart_rate, day.replace(hour=h, minute=5), value=70 + h % 20)
            )
    return records


def throughput_records(
    days: int = 114, per_vendor_hr_per_day: int = 2000
) -> list[RawRecord]:
    """Synthetic 4-vendor corpus around one million raw records."""
    records: list[RawRecord] = []
    first = datetime(2024, 1, 1)
    vendors = list(VendorKind)
    for d in range(days):
        day = first + timedelta(days=d)
        for v in vendors:
            for k in range(per_vendor_hr_per_day):
                t = day + timedelta(seconds=(k * 43) % 86400)
                records.append(_rec(v, ItemKind.heart_rate, t, value=55 + (k * 7) % 60))
            for k in range(144):
                s = day + timedelta(minutes=10 * k, seconds=15)
                records.append(
                    _rec(v, ItemKind.steps, s, s + timedelta(minutes=5), (k * 13) % 120)
                )
    return records


# --- vendor export fixture files ------------------------------------------


def vendor_fixture_records(
    first_day: date = date(2024, 3, 15),
) -> dict[tuple[VendorKind, str], list[RawRecord]]:
    """One small record set per (vendor, file kind), mutually consistent."""
    day = datetime.combine(first_day, datetime.min.time())
    out: dict[tuple[VendorKind, str], list[RawRecord]] = {}

    for v in VendorKind:
        act_steps = 400 if v is not VendorKind.apple else 350
        if v in (VendorKind.samsung, VendorKind.apple):
            s = day.replace(hour=9)
            out[(v, "activity")] = [
                _rec(v, ItemKind.steps, s, s + timedelta(minutes=20), act_steps),
                _rec(v, ItemKind.activity_duration, s, s + timedelta(minutes=20)),
            ]
        else:
            out[(v, "activity")] = [
                _rec(v, ItemKind.steps, day.replace(hour=9, minute=m),
                     day.replace(hour=9, minute=m + 1), 60 + m)
                for m in range(0, 20, 5)
            ]
        s = day.replace(hour=17)
        if v is VendorKind.apple:
            out[(v, "exercise")] = [
                _rec(v, ItemKind.exercise_duration, s, s + timedelta(minutes=30))
            ]
        else:
            out[(v, "exercise")] = [
                _rec(v, ItemKind.steps, s, s + timedelta(minutes=30), 2400),
                _rec(v, ItemKind.exercise_duration, s, s + timedelta(minutes=30)),
            ]
        out[(v, "heart_rate")] = [
            _rec(v, ItemKind.heart_rate, day.replace(hour=h, minute=4), value=62 + h)
            for h in range(7, 22)
        ]
        if v is not VendorKind.xiaomi:
            out[(v, "oxygen_saturation")] = [
                _rec(v, ItemKind.oxygen_saturation, day.replace(hour=h, minute=7), value=97)
                for h in (3, 11, 15)
            ]
        sleep_start = day.replace(hour=0, minute=40)
        out[(v, "sleep")] = [
            _rec(v, ItemKind.sleep_duration, sleep_start, sleep_start + timedelta(hours=6))
        ]
        if v is not VendorKind.xiaomi:
            out[(v, "sleep_stage")] = [
                _rec(v, ItemKind.sleep_stage, sleep_start + timedelta(hours=k),
                     sleep_start + timedelta(hours=k + 1), stage=st)
                for k, st in enumerate(
                    (SleepStage.light, SleepStage.deep, SleepStage.rem,
                     SleepStage.deep, SleepStage.light, SleepStage.awake)
                )
            ]
    return out


def write_vendor_fixtures(
    directory: str | Path, config: AdapterConfig | None = None
) -> list[Path]:
    """Write one export file per (vendor, file kind) into a directory."""
    config = config or AdapterConfig()
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for (vendor, kind), records in vendor_fixture_records().items():
        path = directory / f"{vendor.value}_{kind}.csv"
        path.write_text(render_export(vendor, kind, records, config))
        paths.append(path)
    # Xiaomi daily-aggregated sleep stages: parse reports them and skips.
    path = directory / "xiaomi_sleep_stage.csv"
    path.write_text("date,stage,total_minutes\n2024-03-15,deep,95\n2024-03-15,light,180\n")
    paths.append(path)
    return paths

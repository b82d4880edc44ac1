"""Completeness, recency, and plausibility metrics, plus day filters.

Thresholds the source prototype leaves open (heart-rate bounds, the
steps-during-sleep threshold, the sleep-window minimum, the correlation
pair minimum, the recency lookback) are configurable with stated defaults.
Filters are inclusive: a day meeting a minimum (>=) is kept.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from datetime import date, datetime, timedelta

from .integrate import daily_rollup
from .model import CanonicalFrame, Dataset, SleepStage


class InvalidConfigError(ValueError):
    """A filter or metric configuration value is out of range."""


@dataclass(frozen=True)
class FilterSpec:
    """User-chosen day-retention criteria plus plausibility configuration."""

    min_wear_minutes_per_day: int | None = None
    min_steps_per_day: int | None = None
    date_range: tuple[date, date] | None = None
    hr_bounds: tuple[int, int] = (25, 220)
    steps_during_sleep_step_threshold: int = 20
    sleep_window_min_minutes: int = 8
    recency_lookback_days: int = 30
    min_correlation_pairs: int = 30

    def __post_init__(self) -> None:
        low, high = self.hr_bounds
        if low >= high:
            raise InvalidConfigError(f"hr bounds low {low} must be < high {high}")
        for name in ("min_wear_minutes_per_day", "min_steps_per_day",
                     "steps_during_sleep_step_threshold", "sleep_window_min_minutes"):
            v = getattr(self, name)
            if v is not None and v < 0:
                raise InvalidConfigError(f"{name} must be non-negative, got {v}")
        if self.recency_lookback_days <= 0:
            raise InvalidConfigError("recency lookback must be positive")
        if self.date_range is not None and self.date_range[0] > self.date_range[1]:
            raise InvalidConfigError(f"inverted date range: {self.date_range}")


@dataclass
class PlausibilityFindings:
    steps_during_sleep: list[tuple[datetime, int, int]] = field(default_factory=list)
    step_hr_correlation: float | None = None
    correlation_pairs: int = 0
    hr_outliers: list[tuple[datetime, int]] = field(default_factory=list)
    config: FilterSpec = field(default_factory=FilterSpec)


@dataclass
class QualityReport:
    per_day_completeness: dict[date, float]
    overall_completeness: float
    recency_proportion: float
    average_age_days: float
    plausibility: PlausibilityFindings
    per_day_wear_minutes: dict[date, int]

    def to_dict(self) -> dict:
        """Stable-keyed tree form used by the API and CLI report output."""
        p = self.plausibility
        return {
            "completeness": {
                "overall": self.overall_completeness,
                "per_day": {d.isoformat(): v for d, v in self.per_day_completeness.items()},
            },
            "recency": {
                "proportion_within_lookback": self.recency_proportion,
                "average_age_days": self.average_age_days,
                "lookback_days": p.config.recency_lookback_days,
            },
            "plausibility": {
                "steps_during_sleep": [
                    {"window_start": w.strftime("%Y-%m-%d %H:%M:%S"),
                     "steps": s, "sleep_minutes": m}
                    for w, s, m in p.steps_during_sleep
                ],
                "step_hr_correlation": p.step_hr_correlation,
                "correlation_pairs": p.correlation_pairs,
                "hr_outliers": [
                    {"window_start": w.strftime("%Y-%m-%d %H:%M:%S"), "bpm": b}
                    for w, b in p.hr_outliers
                ],
                "config": {
                    "hr_bounds": list(p.config.hr_bounds),
                    "steps_during_sleep_step_threshold":
                        p.config.steps_during_sleep_step_threshold,
                    "sleep_window_min_minutes": p.config.sleep_window_min_minutes,
                    "min_correlation_pairs": p.config.min_correlation_pairs,
                },
            },
            "wear": {
                "per_day_minutes": {d.isoformat(): v
                                    for d, v in self.per_day_wear_minutes.items()},
            },
        }


def _frames_by_date(dataset: Dataset) -> dict[date, list[CanonicalFrame]]:
    out: dict[date, list[CanonicalFrame]] = {}
    for f in dataset.frames:
        out.setdefault(f.window_start.date(), []).append(f)
    return out


def wear_minutes(dataset: Dataset, day: date) -> int:
    """Windows on the date with any recorded item, times the interval."""
    count = sum(1 for f in dataset.frames if f.window_start.date() == day)
    return count * dataset.grid.interval_minutes


def completeness(dataset: Dataset) -> tuple[dict[date, float], float]:
    """Per-day fraction of non-empty windows, and its mean over the span.

    Days inside the collection span with no data contribute zero to the
    overall mean.
    """
    per_window_day = dataset.grid.windows_per_day
    by_date = _frames_by_date(dataset)
    per_day = {d: len(by_date.get(d, [])) / per_window_day for d in dataset.dates()}
    overall = sum(per_day.values()) / len(per_day) if per_day else 0.0
    return per_day, overall


def recency(
    dataset: Dataset, lookback_days: int, reference: datetime | None = None
) -> tuple[float, float]:
    """Freshness: fraction of frames within the lookback, and mean age in days."""
    if lookback_days <= 0:
        raise InvalidConfigError("lookback must be positive")
    if not dataset.frames:
        return 0.0, 0.0
    if reference is None:
        reference = dataset.frames[-1].window_start
    cutoff = reference - timedelta(days=lookback_days)
    n = len(dataset.frames)
    within = sum(1 for f in dataset.frames if cutoff <= f.window_start <= reference)
    total_age = sum((reference - f.window_start).total_seconds() for f in dataset.frames)
    return within / n, total_age / n / 86400.0


def pearson_r(pairs: list[tuple[float, float]]) -> float | None:
    """Pearson product-moment correlation; None when undefined."""
    n = len(pairs)
    if n < 2:
        return None
    mx = sum(x for x, _ in pairs) / n
    my = sum(y for _, y in pairs) / n
    sxx = sum((x - mx) ** 2 for x, _ in pairs)
    syy = sum((y - my) ** 2 for _, y in pairs)
    if sxx == 0.0 or syy == 0.0:
        return None
    sxy = sum((x - mx) * (y - my) for x, y in pairs)
    r = sxy / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def plausibility(dataset: Dataset, spec: FilterSpec) -> PlausibilityFindings:
    """Internal-consistency findings: steps during sleep, step/HR
    correlation, and heart-rate outliers."""
    findings = PlausibilityFindings(config=spec)
    low, high = spec.hr_bounds
    pairs: list[tuple[float, float]] = []
    for f in dataset.frames:
        if (
            f.sleep_minutes is not None
            and f.sleep_minutes >= spec.sleep_window_min_minutes
            and f.sleep_stage is not SleepStage.awake
            and f.steps is not None
            and f.steps > spec.steps_during_sleep_step_threshold
        ):
            findings.steps_during_sleep.append((f.window_start, f.steps, f.sleep_minutes))
        if f.heart_rate_bpm is not None and not low <= f.heart_rate_bpm <= high:
            findings.hr_outliers.append((f.window_start, f.heart_rate_bpm))
        if f.steps is not None and f.heart_rate_bpm is not None:
            pairs.append((float(f.steps), float(f.heart_rate_bpm)))
    findings.correlation_pairs = len(pairs)
    if len(pairs) >= spec.min_correlation_pairs:
        findings.step_hr_correlation = pearson_r(pairs)
    return findings


def quality_report(dataset: Dataset, spec: FilterSpec | None = None) -> QualityReport:
    spec = spec or FilterSpec()
    per_day, overall = completeness(dataset)
    proportion, age = recency(dataset, spec.recency_lookback_days)
    return QualityReport(
        per_day_completeness=per_day,
        overall_completeness=overall,
        recency_proportion=proportion,
        average_age_days=age,
        plausibility=plausibility(dataset, spec),
        per_day_wear_minutes={d: wear_minutes(dataset, d) for d in dataset.dates()},
    )


def apply_filter(
    dataset: Dataset, spec: FilterSpec
) -> tuple[Dataset, list[date], list[tuple[date, str]]]:
    """Day-granular retention: keep a date iff it passes every present
    criterion. Non-destructive; dropped dates carry the first failing
    criterion ("wear", "steps", or "date_range")."""
    summaries = {s.date: s for s in daily_rollup(dataset)}
    kept: list[date] = []
    dropped: list[tuple[date, str]] = []
    for d in dataset.dates():
        s = summaries[d]
        if (
            spec.min_wear_minutes_per_day is not None
            and s.wear_minutes < spec.min_wear_minutes_per_day
        ):
            dropped.append((d, "wear"))
        elif spec.min_steps_per_day is not None and s.total_steps < spec.min_steps_per_day:
            dropped.append((d, "steps"))
        elif spec.date_range is not None and not (
            spec.date_range[0] <= d <= spec.date_range[1]
        ):
            dropped.append((d, "date_range"))
        else:
            kept.append(d)
    kept_set = set(kept)
    filtered = replace(
        dataset,
        frames=[f for f in dataset.frames if f.window_start.date() in kept_set],
    )
    return filtered, kept, dropped

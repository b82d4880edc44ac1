"""Dataset persistence and the canonical CSV export.

Storage is an embedded directory layout: one directory per dataset holding
a JSON manifest, a full-fidelity frames file (JSON lines), optional quality
reports, and named filter specs. Writes are atomic (write-new-then-swap).

The canonical CSV is bit-specified: fixed header, one row per non-empty
frame ascending by window start, absent values as empty fields, UTF-8 with
LF line endings. No field ever contains a comma, so no quoting is needed.
The ``sources`` field is the bare vendor when every present item came from
one vendor, else ``;``-joined ``item=vendor`` pairs.
"""
from __future__ import annotations

import hashlib
import json
import os
import shutil
import tempfile
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from .model import (
    CanonicalFrame,
    Dataset,
    ItemKind,
    SleepStage,
    VendorKind,
    WindowGrid,
    format_ts,
    parse_ts,
)
from .quality import FilterSpec, QualityReport

CSV_HEADER = "window_start,steps,activity_min,exercise_min,heart_rate_bpm,spo2_pct,sleep_min,sleep_stage,sources"

_CSV_FIELDS = (
    "steps",
    "activity_minutes",
    "exercise_minutes",
    "heart_rate_bpm",
    "spo2_percent",
    "sleep_minutes",
)


class CsvSchemaError(ValueError):
    """Header row does not match the canonical CSV specification."""


class CsvParseError(ValueError):
    """A canonical CSV row is malformed; message carries the line number."""


class NotFoundError(KeyError):
    """No stored dataset under the given id."""


def _render_sources(frame: CanonicalFrame) -> str:
    items = frame.present_items()
    vendors = {frame.sources[i] for i in items}
    if len(vendors) == 1:
        return next(iter(vendors)).value
    return ";".join(f"{i.value}={frame.sources[i].value}" for i in items)


def _parse_sources(text: str, frame: CanonicalFrame, lineno: int) -> None:
    items = frame.present_items()
    if not text:
        if items:
            raise CsvParseError(f"line {lineno}: missing sources for present items")
        return
    if "=" not in text:
        try:
            vendor = VendorKind(text)
        except ValueError:
            raise CsvParseError(f"line {lineno}: unknown vendor {text!r}")
        frame.sources = {i: vendor for i in items}
        return
    for pair in text.split(";"):
        name, _, vend = pair.partition("=")
        try:
            frame.sources[ItemKind(name)] = VendorKind(vend)
        except ValueError:
            raise CsvParseError(f"line {lineno}: bad sources entry {pair!r}")


def export_canonical_csv(dataset: Dataset, spec: FilterSpec | None = None) -> bytes:
    """Serialize (optionally filtered) frames to the canonical CSV."""
    frames = dataset.frames
    if spec is not None:
        from .quality import apply_filter

        frames = apply_filter(dataset, spec)[0].frames
    lines = [CSV_HEADER]
    for f in sorted(frames, key=lambda fr: fr.window_start):
        cells = [format_ts(f.window_start)]
        for name in _CSV_FIELDS:
            v = getattr(f, name)
            cells.append("" if v is None else str(v))
        cells.append(f.sleep_stage.value if f.sleep_stage else "")
        cells.append(_render_sources(f))
        lines.append(",".join(cells))
    return ("\n".join(lines) + "\n").encode("utf-8")


def import_canonical_csv(
    content: bytes,
    dataset_id: str = "imported",
    timezone_name: str = "Asia/Seoul",
    grid: WindowGrid | None = None,
) -> Dataset:
    """Rebuild a Dataset from a canonical CSV export.

    Provenance manifests and per-window sample counts are not carried by
    the CSV, so they come back empty.
    """
    text = content.decode("utf-8")
    lines = text.splitlines()
    if not lines or lines[0].strip() != CSV_HEADER:
        raise CsvSchemaError(f"header does not match canonical spec: {lines[:1]!r}")
    frames: list[CanonicalFrame] = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        cells = line.split(",")
        if len(cells) != 9:
            raise CsvParseError(f"line {lineno}: expected 9 fields, got {len(cells)}")
        try:
            frame = CanonicalFrame(window_start=parse_ts(cells[0]))
        except ValueError as exc:
            raise CsvParseError(f"line {lineno}: {exc}")
        for name, cell in zip(_CSV_FIELDS, cells[1:7]):
            if cell:
                try:
                    setattr(frame, name, int(cell))
                except ValueError:
                    raise CsvParseError(f"line {lineno}: bad integer {cell!r} in {name}")
        if cells[7]:
            try:
                frame.sleep_stage = SleepStage(cells[7])
            except ValueError:
                raise CsvParseError(f"line {lineno}: unknown sleep stage {cells[7]!r}")
            if not (frame.sleep_minutes or 0) > 0:
                raise CsvParseError(
                    f"line {lineno}: sleep_stage present without positive sleep_min"
                )
        _parse_sources(cells[8], frame, lineno)
        frames.append(frame)
    if grid is None:
        grid = _infer_grid(frames)
    ds = Dataset(dataset_id=dataset_id, timezone=timezone_name, grid=grid, frames=frames)
    ds.validate()
    return ds


def _infer_grid(frames: list[CanonicalFrame]) -> WindowGrid:
    """Smallest standard interval consistent with the window alignments."""
    from .model import to_epoch_seconds

    for minutes in (30, 10, 5, 1):
        if all(to_epoch_seconds(f.window_start) % (minutes * 60) == 0 for f in frames):
            return WindowGrid(minutes)
    return WindowGrid(1)


# --- frame/dataset <-> JSON (full fidelity, for persistence) -------------


def frame_to_json(f: CanonicalFrame) -> dict:
    d: dict = {"window_start": format_ts(f.window_start)}
    for name in _CSV_FIELDS:
        v = getattr(f, name)
        if v is not None:
            d[name] = v
    if f.sleep_stage is not None:
        d["sleep_stage"] = f.sleep_stage.value
    if f.sources:
        d["sources"] = {i.value: v.value for i, v in f.sources.items()}
    if f.sample_counts:
        d["sample_counts"] = {i.value: n for i, n in f.sample_counts.items()}
    return d


def frame_from_json(d: dict) -> CanonicalFrame:
    f = CanonicalFrame(window_start=parse_ts(d["window_start"]))
    for name in _CSV_FIELDS:
        if name in d:
            setattr(f, name, d[name])
    if "sleep_stage" in d:
        f.sleep_stage = SleepStage(d["sleep_stage"])
    f.sources = {ItemKind(i): VendorKind(v) for i, v in d.get("sources", {}).items()}
    f.sample_counts = {ItemKind(i): n for i, n in d.get("sample_counts", {}).items()}
    return f


@dataclass
class SourceFile:
    name: str
    vendor: str
    size: int
    sha256: str


@dataclass
class Manifest:
    dataset_id: str
    created_at: str
    timezone: str
    interval_minutes: int
    frame_count: int
    collection_span: tuple[str, str] | None
    source_files: list[SourceFile] = field(default_factory=list)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["collection_span"] = list(self.collection_span) if self.collection_span else None
        return d


def file_digest(content: bytes) -> str:
    return hashlib.sha256(content).hexdigest()


def _filterspec_to_json(spec: FilterSpec) -> dict:
    return {
        "min_wear_minutes_per_day": spec.min_wear_minutes_per_day,
        "min_steps_per_day": spec.min_steps_per_day,
        "date_range": [d.isoformat() for d in spec.date_range] if spec.date_range else None,
        "hr_bounds": list(spec.hr_bounds),
        "steps_during_sleep_step_threshold": spec.steps_during_sleep_step_threshold,
        "sleep_window_min_minutes": spec.sleep_window_min_minutes,
        "recency_lookback_days": spec.recency_lookback_days,
        "min_correlation_pairs": spec.min_correlation_pairs,
    }


def _filterspec_from_json(d: dict) -> FilterSpec:
    from datetime import date as _date

    rng = d.get("date_range")
    return FilterSpec(
        min_wear_minutes_per_day=d.get("min_wear_minutes_per_day"),
        min_steps_per_day=d.get("min_steps_per_day"),
        date_range=tuple(_date.fromisoformat(x) for x in rng) if rng else None,
        hr_bounds=tuple(d.get("hr_bounds", (25, 220))),
        steps_during_sleep_step_threshold=d.get("steps_during_sleep_step_threshold", 20),
        sleep_window_min_minutes=d.get("sleep_window_min_minutes", 8),
        recency_lookback_days=d.get("recency_lookback_days", 30),
        min_correlation_pairs=d.get("min_correlation_pairs", 30),
    )


class DatasetStore:
    """Directory-per-dataset persistence, keyed by dataset_id.

    Single writer per dataset id; readers see a consistent snapshot because
    each save builds a fresh directory and swaps it into place.
    """

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def _dir(self, dataset_id: str) -> Path:
        if not dataset_id or "/" in dataset_id or dataset_id.startswith("."):
            raise NotFoundError(dataset_id)
        return self.root / dataset_id

    def save(
        self,
        dataset: Dataset,
        source_files: list[SourceFile] | None = None,
        quality: QualityReport | None = None,
        filter_specs: dict[str, FilterSpec] | None = None,
    ) -> None:
        span = dataset.collection_span
        manifest = Manifest(
            dataset_id=dataset.dataset_id,
            created_at=datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ"),
            timezone=dataset.timezone,
            interval_minutes=dataset.grid.interval_minutes,
            frame_count=len(dataset.frames),
            collection_span=(span[0].isoformat(), span[1].isoformat()) if span else None,
            source_files=source_files or [],
        )
        tmp = Path(tempfile.mkdtemp(dir=self.root, prefix=".tmp-"))
        try:
            (tmp / "manifest.json").write_text(
                json.dumps(manifest.to_dict(), indent=2) + "\n"
            )
            with open(tmp / "frames.jsonl", "w") as fh:
                for f in dataset.frames:
                    fh.write(json.dumps(frame_to_json(f)) + "\n")
            if quality is not None:
                (tmp / "quality.json").write_text(
                    json.dumps(quality.to_dict(), indent=2) + "\n"
                )
            if filter_specs:
                (tmp / "filters.json").write_text(
                    json.dumps(
                        {k: _filterspec_to_json(v) for k, v in filter_specs.items()},
                        indent=2,
                    )
                    + "\n"
                )
            target = self._dir(dataset.dataset_id)
            if target.exists():
                shutil.rmtree(target)
            os.replace(tmp, target)
        except BaseException:
            shutil.rmtree(tmp, ignore_errors=True)
            raise

    def load(self, dataset_id: str) -> Dataset:
        d = self._dir(dataset_id)
        if not d.is_dir():
            raise NotFoundError(dataset_id)
        manifest = json.loads((d / "manifest.json").read_text())
        frames = [
            frame_from_json(json.loads(line))
            for line in (d / "frames.jsonl").read_text().splitlines()
            if line.strip()
        ]
        ds = Dataset(
            dataset_id=manifest["dataset_id"],
            timezone=manifest["timezone"],
            grid=WindowGrid(manifest["interval_minutes"]),
            frames=frames,
        )
        ds.validate()
        return ds

    def load_manifest(self, dataset_id: str) -> dict:
        d = self._dir(dataset_id)
        if not d.is_dir():
            raise NotFoundError(dataset_id)
        return json.loads((d / "manifest.json").read_text())

    def list(self) -> list[dict]:
        out = []
        for entry in sorted(self.root.iterdir()):
            if entry.is_dir() and not entry.name.startswith("."):
                out.append(json.loads((entry / "manifest.json").read_text()))
        return out

    def delete(self, dataset_id: str) -> None:
        d = self._dir(dataset_id)
        if not d.is_dir():
            raise NotFoundError(dataset_id)
        shutil.rmtree(d)

    def save_filter_spec(self, dataset_id: str, name: str, spec: FilterSpec) -> None:
        d = self._dir(dataset_id)
        if not d.is_dir():
            raise NotFoundError(dataset_id)
        path = d / "filters.json"
        specs = json.loads(path.read_text()) if path.exists() else {}
        specs[name] = _filterspec_to_json(spec)
        tmp = path.with_suffix(".json.tmp")
        tmp.write_text(json.dumps(specs, indent=2) + "\n")
        os.replace(tmp, path)

    def load_filter_spec(self, dataset_id: str, name: str) -> FilterSpec:
        d = self._dir(dataset_id)
        path = d / "filters.json"
        if not d.is_dir() or not path.exists():
            raise NotFoundError(f"{dataset_id}/{name}")
        specs = json.loads(path.read_text())
        if name not in specs:
            raise NotFoundError(f"{dataset_id}/{name}")
        return _filterspec_from_json(specs[name])

"""vital: integration, quality management, and export of armband wearable data."""

from .adapters import AdapterConfig, RawRecord, detect_vendor, parse_export
from .integrate import MergePolicy, daily_rollup, integrate
from .model import (
    CanonicalFrame,
    DailySummary,
    Dataset,
    ItemKind,
    SleepStage,
    VendorKind,
    WindowGrid,
    align_to_window,
    overlap_decomposition,
)
from .quality import FilterSpec, QualityReport, apply_filter, quality_report
from .store import DatasetStore, export_canonical_csv, import_canonical_csv

__all__ = [
    "AdapterConfig",
    "CanonicalFrame",
    "DailySummary",
    "Dataset",
    "DatasetStore",
    "FilterSpec",
    "ItemKind",
    "MergePolicy",
    "QualityReport",
    "RawRecord",
    "SleepStage",
    "VendorKind",
    "WindowGrid",
    "align_to_window",
    "apply_filter",
    "daily_rollup",
    "detect_vendor",
    "export_canonical_csv",
    "import_canonical_csv",
    "integrate",
    "overlap_decomposition",
    "parse_export",
    "quality_report",
]

__version__ = "0.1.0"

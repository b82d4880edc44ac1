"""Batch CLI mirroring the HTTP API.

Subcommands: ``integrate`` (vendor exports -> dataset directory),
``quality`` (JSON report), ``filter`` (day retention + CSV export), and
``serve`` (run the HTTP API). Exit code 0 on success, nonzero with a
diagnostic on failure.
"""
from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .adapters import (
    AdapterConfig,
    UnknownFormatError,
    detect_vendor,
    parse_export,
)
from .integrate import EmptyDatasetError, integrate
from .model import GridError, WindowGrid
from .quality import FilterSpec, InvalidConfigError, apply_filter, quality_report
from .store import DatasetStore, SourceFile, export_canonical_csv, file_digest


def _load_dataset_dir(dataset_dir: str):
    path = Path(dataset_dir).resolve()
    if not (path / "manifest.json").is_file():
        raise click.ClickException(f"not a dataset directory: {dataset_dir}")
    store = DatasetStore(path.parent)
    return store.load(path.name)


@click.group()
def main() -> None:
    """Integrate, inspect, and filter armband wearable exports."""


@main.command("integrate")
@click.option("--in", "in_dir", required=True, type=click.Path(exists=True, file_okay=False),
              help="Directory of vendor export files.")
@click.option("--tz", "timezone", default="Asia/Seoul", show_default=True,
              help="Dataset reference timezone.")
@click.option("--interval", default=10, show_default=True, help="Window length in minutes.")
@click.option("--out", "out_dir", required=True, type=click.Path(),
              help="Dataset directory to create.")
def integrate_cmd(in_dir: str, timezone: str, interval: int, out_dir: str) -> None:
    """Parse every export in --in and integrate into a dataset directory."""
    try:
        grid = WindowGrid(interval)
    except GridError as exc:
        raise click.ClickException(str(exc))
    config = AdapterConfig(timezone=timezone)
    records = []
    source_files = []
    for path in sorted(Path(in_dir).iterdir()):
        if not path.is_file():
            continue
        content = path.read_bytes()
        header = content.decode("utf-8", errors="replace").splitlines()[0] if content else ""
        try:
            vendor = detect_vendor(path.name, header)
        except UnknownFormatError as exc:
            click.echo(f"{path.name}:1: unknown-format: {exc}", err=True)
            continue
        recs, diags = parse_export(vendor, content, config, file_name=path.name)
        for d in diags:
            click.echo(str(d), err=True)
        records.extend(recs)
        source_files.append(
            SourceFile(name=path.name, vendor=vendor.value,
                       size=len(content), sha256=file_digest(content))
        )
    out = Path(out_dir).resolve()
    try:
        dataset = integrate(records, grid, dataset_id=out.name, timezone=timezone)
    except EmptyDatasetError:
        raise click.ClickException("no parseable records found in input directory")
    DatasetStore(out.parent).save(dataset, source_files=source_files)
    click.echo(f"integrated {len(records)} records into {len(dataset.frames)} frames at {out}")


@main.command()
@click.argument("dataset_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--lookback-days", default=30, show_default=True)
def quality(dataset_dir: str, lookback_days: int) -> None:
    """Print the quality report (completeness, recency, plausibility) as JSON."""
    dataset = _load_dataset_dir(dataset_dir)
    try:
        spec = FilterSpec(recency_lookback_days=lookback_days)
    except InvalidConfigError as exc:
        raise click.ClickException(str(exc))
    click.echo(json.dumps(quality_report(dataset, spec).to_dict(), indent=2))


@main.command("filter")
@click.argument("dataset_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--min-wear-hours", type=float, default=None,
              help="Keep only days worn at least this many hours.")
@click.option("--min-steps", type=int, default=None,
              help="Keep only days with at least this many steps.")
@click.option("--from", "from_date", default=None, help="First date to keep (YYYY-MM-DD).")
@click.option("--to", "to_date", default=None, help="Last date to keep (YYYY-MM-DD).")
@click.option("--export", "export_path", type=click.Path(), default=None,
              help="Write the filtered canonical CSV here.")
def filter_cmd(dataset_dir, min_wear_hours, min_steps, from_date, to_date, export_path):
    """Apply day-retention criteria; print the retention summary."""
    from datetime import date

    dataset = _load_dataset_dir(dataset_dir)
    date_range = None
    if from_date or to_date:
        span = dataset.collection_span
        first = date.fromisoformat(from_date) if from_date else span[0]
        last = date.fromisoformat(to_date) if to_date else span[1]
        date_range = (first, last)
    try:
        spec = FilterSpec(
            min_wear_minutes_per_day=(
                int(round(min_wear_hours * 60)) if min_wear_hours is not None else None
            ),
            min_steps_per_day=min_steps,
            date_range=date_range,
        )
    except InvalidConfigError as exc:
        raise click.ClickException(str(exc))
    filtered, kept, dropped = apply_filter(dataset, spec)
    for d in kept:
        click.echo(f"kept {d.isoformat()}")
    for d, reason in dropped:
        click.echo(f"dropped {d.isoformat()}: {reason}")
    click.echo(f"{len(kept)} days kept, {len(dropped)} days dropped")
    if export_path:
        Path(export_path).write_bytes(export_canonical_csv(filtered))
        click.echo(f"exported {len(filtered.frames)} frames to {export_path}")


@main.command()
@click.option("--addr", default="127.0.0.1:8000", show_default=True,
              help="host:port to bind.")
@click.option("--data-dir", default=None, help="Store root (default $VITAL_DATA_DIR).")
def serve(addr: str, data_dir: str | None) -> None:
    """Run the HTTP API."""
    import uvicorn

    from .service import create_app

    host, _, port = addr.partition(":")
    if not port.isdigit():
        raise click.ClickException(f"--addr must be host:port, got {addr!r}")
    uvicorn.run(create_app(data_dir=data_dir), host=host or "127.0.0.1", port=int(port))


if __name__ == "__main__":
    sys.exit(main())

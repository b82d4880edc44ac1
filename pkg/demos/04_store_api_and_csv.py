"""
Persistence, canonical CSV, and the HTTP API
============================================

Datasets persist as self-describing directories, export to a canonical
CSV that round-trips losslessly, and are served over a small HTTP API.
This demo drives the API in-process with an HTTP test client, so no
server needs to be running.
"""
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from vital import DatasetStore, WindowGrid, integrate
from vital.fixtures import study_period_records, write_vendor_fixtures
from vital.service import create_app
from vital.store import export_canonical_csv, import_canonical_csv

workdir = Path(tempfile.mkdtemp(prefix="vital-demo-"))

###############################################################################
# Saving writes manifest.json, frames.jsonl, and quality.json atomically;
# loading returns a dataset equal to the original, field for field.
dataset = integrate(study_period_records(), WindowGrid(10), dataset_id="study")
store = DatasetStore(workdir / "data")
store.save(dataset)
assert store.load("study") == dataset
print("store round trip: ok,", len(dataset.frames), "frames")

###############################################################################
# The canonical CSV has a fixed nine-column header, LF line endings, and
# rows sorted by window start. Import reproduces the exported frames.
csv_bytes = export_canonical_csv(dataset)
print("csv header:", csv_bytes.decode().splitlines()[0])
back = import_canonical_csv(csv_bytes, grid=dataset.grid)
print("csv round trip:", len(back.frames), "frames re-imported")

###############################################################################
# The HTTP API covers the whole flow: open an upload session, attach raw
# vendor files, integrate, then query frames and quality.
export_dir = workdir / "exports"
write_vendor_fixtures(export_dir)
app = create_app(data_dir=str(workdir / "data"))
with TestClient(app) as client:
    session = client.post("/sessions").json()["session_id"]
    files = [("files", (p.name, p.read_bytes(), "text/csv"))
             for p in sorted(export_dir.iterdir())]
    uploaded = client.post(f"/sessions/{session}/files", files=files).json()
    print("uploaded:", [f["name"] for f in uploaded["files"]])

    result = client.post(f"/sessions/{session}/integrate",
                         params={"interval": 10}).json()
    print("integrated dataset:", result["dataset_id"],
          "with", result["frame_count"], "frames")

    daily = client.get(f"/datasets/{result['dataset_id']}/frames",
                       params={"granularity": "daily"}).json()["rows"]
    print("daily rows:", len(daily))

    # Named filters persist server-side and parameterize the CSV export.
    summary = client.post(f"/datasets/{result['dataset_id']}/filter",
                          json={"min_wear_minutes_per_day": 60,
                                "name": "worn"}).json()
    print("filter kept", len(summary["kept_dates"]), "days, dropped",
          len(summary["dropped_dates"]))
    exported = client.get(f"/datasets/{result['dataset_id']}/export.csv",
                          params={"filter": "worn"})
    print("filtered export:", len(exported.text.splitlines()) - 1, "rows")

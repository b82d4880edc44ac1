"""HTTP API over the pipeline: upload, integrate, query, quality, filter, export.

Endpoints (all JSON except the CSV export):

* ``POST /sessions`` - open an upload session.
* ``POST /sessions/{id}/files`` - multipart upload; vendors auto-detected.
* ``POST /sessions/{id}/integrate?interval=10`` - run the pipeline, persist.
* ``GET /datasets`` - stored dataset manifests.
* ``GET /datasets/{id}/frames?granularity=window|daily&from=&to=``
* ``GET /datasets/{id}/quality``
* ``POST /datasets/{id}/filter`` - FilterSpec body; returns the retention
  summary and optionally saves the spec under a name.
* ``GET /datasets/{id}/export.csv?filter=<named-spec>``

Every error body is ``{"code": ..., "message": ...}``. Auth is a static
bearer token: set ``VITAL_TOKEN`` to require ``Authorization: Bearer``.
"""
from __future__ import annotations

import os
import uuid
from dataclasses import dataclass, field
from datetime import date

from fastapi import FastAPI, Query, Request, Response, UploadFile
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .adapters import (
    AdapterConfig,
    Diagnostic,
    RawRecord,
    UnknownFormatError,
    detect_vendor,
    parse_export,
)
from .integrate import EmptyDatasetError, daily_rollup, integrate
from .model import Dataset, GridError, WindowGrid
from .quality import FilterSpec, InvalidConfigError, apply_filter, quality_report
from .store import (
    DatasetStore,
    NotFoundError,
    SourceFile,
    export_canonical_csv,
    file_digest,
    frame_to_json,
)


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        self.status = status
        self.code = code
        self.message = message
        super().__init__(message)


@dataclass
class UploadSession:
    session_id: str
    state: str = "receiving"  # receiving -> integrated | failed
    files: list[dict] = field(default_factory=list)
    blobs: list[tuple[str, bytes]] = field(default_factory=list)
    diagnostics: list[str] = field(default_factory=list)


def _parse_date(text: str, name: str) -> date:
    try:
        return date.fromisoformat(text)
    except ValueError:
        raise ApiError(400, "bad-request", f"{name} must be YYYY-MM-DD, got {text!r}")


def _spec_from_body(body: dict) -> FilterSpec:
    known = {
        "min_wear_minutes_per_day", "min_steps_per_day", "date_range",
        "hr_bounds", "steps_during_sleep_step_threshold",
        "sleep_window_min_minutes", "recency_lookback_days",
        "min_correlation_pairs",
    }
    unknown = set(body) - known - {"name"}
    if unknown:
        raise ApiError(400, "bad-request", f"unknown filter fields: {sorted(unknown)}")
    kwargs: dict = {k: v for k, v in body.items() if k in known and v is not None}
    if "date_range" in kwargs:
        rng = kwargs["date_range"]
        if not isinstance(rng, (list, tuple)) or len(rng) != 2:
            raise ApiError(400, "bad-request", "date_range must be [first, last]")
        kwargs["date_range"] = tuple(_parse_date(str(x), "date_range") for x in rng)
    if "hr_bounds" in kwargs:
        kwargs["hr_bounds"] = tuple(kwargs["hr_bounds"])
    try:
        return FilterSpec(**kwargs)
    except (InvalidConfigError, TypeError) as exc:
        raise ApiError(400, "bad-request", str(exc))


def create_app(data_dir: str | None = None, token: str | None = None) -> FastAPI:
    data_dir = data_dir or os.environ.get("VITAL_DATA_DIR", "./vital-data")
    token = token if token is not None else os.environ.get("VITAL_TOKEN")
    store = DatasetStore(data_dir)
    sessions: dict[str, UploadSession] = {}
    quality_cache: dict[str, dict] = {}

    app = FastAPI(title="vital", version="0.1.0")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.exception_handler(ApiError)
    async def _api_error(_req: Request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status, content={"code": exc.code, "message": exc.message}
        )

    @app.exception_handler(RequestValidationError)
    async def _validation_error(_req: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400, content={"code": "bad-request", "message": str(exc)}
        )

    @app.middleware("http")
    async def _auth(request: Request, call_next):
        if token:
            header = request.headers.get("authorization", "")
            if header != f"Bearer {token}":
                return JSONResponse(
                    status_code=401,
                    content={"code": "unauthorized", "message": "missing or bad token"},
                )
        return await call_next(request)

    def _session(session_id: str) -> UploadSession:
        s = sessions.get(session_id)
        if s is None:
            raise ApiError(404, "not-found", f"no session {session_id}")
        return s

    def _dataset(dataset_id: str) -> Dataset:
        try:
            return store.load(dataset_id)
        except NotFoundError:
            raise ApiError(404, "not-found", f"no dataset {dataset_id}")

    @app.post("/sessions", status_code=201)
    def create_session():
        sid = uuid.uuid4().hex[:12]
        sessions[sid] = UploadSession(session_id=sid)
        return {"session_id": sid, "state": "receiving"}

    @app.post("/sessions/{session_id}/files")
    async def upload_files(session_id: str, files: list[UploadFile] | None = None):
        session = _session(session_id)
        if session.state != "receiving":
            raise ApiError(409, "bad-state", f"session is {session.state}")
        if not files:
            raise ApiError(400, "bad-request", "no files in upload")
        for f in files:
            content = await f.read()
            name = f.filename or "upload"
            try:
                header = content.decode("utf-8", errors="replace").splitlines()[0] if content else ""
                vendor = detect_vendor(name, header).value
            except UnknownFormatError as exc:
                session.diagnostics.append(f"{name}:1: unknown-format: {exc}")
                continue
            session.files.append(
                {"name": name, "vendor": vendor, "size": len(content),
                 "sha256": file_digest(content)}
            )
            session.blobs.append((name, content))
        return {
            "session_id": session.session_id,
            "state": session.state,
            "files": session.files,
            "diagnostics": session.diagnostics,
        }

    @app.post("/sessions/{session_id}/integrate")
    def integrate_session(
        session_id: str,
        interval: int = Query(10),
        timezone: str = Query("Asia/Seoul"),
    ):
        session = _session(session_id)
        if session.state != "receiving":
            raise ApiError(409, "bad-state", f"session is {session.state}")
        try:
            grid = WindowGrid(interval)
        except GridError as exc:
            raise ApiError(400, "bad-request", str(exc))
        config = AdapterConfig(timezone=timezone)
        records: list[RawRecord] = []
        diagnostics: list[Diagnostic] = []
        for name, content in session.blobs:
            header = content.decode("utf-8", errors="replace").splitlines()[0]
            vendor = detect_vendor(name, header)
            recs, diags = parse_export(vendor, content, config, file_name=name)
            records.extend(recs)
            diagnostics.extend(diags)
        session.diagnostics.extend(str(d) for d in diagnostics)
        if not records:
            session.state = "failed"
            raise ApiError(
                422, "no-records",
                "no parseable records in session; see diagnostics",
            )
        dataset_id = uuid.uuid4().hex[:12]
        dataset = integrate(records, grid, dataset_id=dataset_id, timezone=timezone)
        source_files = [
            SourceFile(name=f["name"], vendor=f["vendor"], size=f["size"], sha256=f["sha256"])
            for f in session.files
        ]
        store.save(dataset, source_files=source_files)
        session.state = "integrated"
        return {
            "dataset_id": dataset_id,
            "frame_count": len(dataset.frames),
            "diagnostics": session.diagnostics,
        }

    @app.get("/datasets")
    def list_datasets():
        return {"datasets": store.list()}

    @app.get("/datasets/{dataset_id}/frames")
    def query_frames(
        dataset_id: str,
        granularity: str = Query("window"),
        from_: str | None = Query(None, alias="from"),
        to: str | None = Query(None),
    ):
        if granularity not in ("window", "daily"):
            raise ApiError(400, "bad-request", f"granularity must be window|daily, got {granularity!r}")
        dataset = _dataset(dataset_id)
        lo = _parse_date(from_, "from") if from_ else None
        hi = _parse_date(to, "to") if to else None
        if lo and hi and lo > hi:
            raise ApiError(400, "bad-request", f"inverted range {lo}..{hi}")

        def in_range(d: date) -> bool:
            return (lo is None or d >= lo) and (hi is None or d <= hi)

        if granularity == "window":
            rows = [
                frame_to_json(f)
                for f in dataset.frames
                if in_range(f.window_start.date())
            ]
        else:
            rows = [
                {
                    "date": s.date.isoformat(),
                    "total_steps": s.total_steps,
                    "total_sleep_minutes": s.total_sleep_minutes,
                    "total_activity_minutes": s.total_activity_minutes,
                    "total_exercise_minutes": s.total_exercise_minutes,
                    "mean_heart_rate_bpm": s.mean_heart_rate_bpm,
                    "mean_spo2_percent": s.mean_spo2_percent,
                    "wear_minutes": s.wear_minutes,
                    "nonempty_windows": s.nonempty_windows,
                }
                for s in daily_rollup(dataset)
                if in_range(s.date)
            ]
        return {"granularity": granularity, "rows": rows}

    @app.get("/datasets/{dataset_id}/quality")
    def get_quality(dataset_id: str, lookback_days: int = Query(30)):
        if lookback_days <= 0:
            raise ApiError(400, "bad-request", "lookback_days must be positive")
        cache_key = f"{dataset_id}:{lookback_days}"
        cached = quality_cache.get(cache_key)
        if cached is not None:
            return cached
        dataset = _dataset(dataset_id)
        report = quality_report(
            dataset, FilterSpec(recency_lookback_days=lookback_days)
        ).to_dict()
        quality_cache[cache_key] = report
        return report

    @app.post("/datasets/{dataset_id}/filter")
    def filter_dataset(dataset_id: str, body: dict):
        dataset = _dataset(dataset_id)
        spec = _spec_from_body(body)
        _filtered, kept, dropped = apply_filter(dataset, spec)
        name = body.get("name")
        if name:
            store.save_filter_spec(dataset_id, str(name), spec)
        return {
            "kept_dates": [d.isoformat() for d in kept],
            "dropped_dates": [{"date": d.isoformat(), "reason": r} for d, r in dropped],
            "saved_as": name,
        }

    @app.get("/datasets/{dataset_id}/export.csv")
    def export_csv(dataset_id: str, filter: str | None = Query(None)):
        dataset = _dataset(dataset_id)
        spec = None
        if filter:
            try:
                spec = store.load_filter_spec(dataset_id, filter)
            except NotFoundError:
                raise ApiError(404, "not-found", f"no saved filter {filter!r}")
        body = export_canonical_csv(dataset, spec)
        return Response(content=body, media_type="text/csv")

    # EmptyDatasetError can only surface through integrate, handled above.
    _ = EmptyDatasetError
    return app

import pytest
from fastapi.testclient import TestClient

from vital.fixtures import STUDY_DAYS, study_period_records, write_vendor_fixtures
from vital.integrate import integrate
from vital.model import WindowGrid
from vital.service import create_app
from vital.store import DatasetStore


@pytest.fixture()
def client(tmp_path):
    app = create_app(data_dir=str(tmp_path / "data"), token="")
    with TestClient(app) as c:
        c.data_dir = str(tmp_path / "data")
        yield c


@pytest.fixture()
def fixture_dir(tmp_path):
    d = tmp_path / "exports"
    write_vendor_fixtures(d)
    return d


def upload_and_integrate(client, fixture_dir, interval=10):
    sid = client.post("/sessions").json()["session_id"]
    files = [
        ("files", (p.name, p.read_bytes(), "text/csv"))
        for p in sorted(fixture_dir.iterdir())
    ]
    r = client.post(f"/sessions/{sid}/files", files=files)
    assert r.status_code == 200
    r = client.post(f"/sessions/{sid}/integrate", params={"interval": interval})
    assert r.status_code == 200, r.text
    return r.json()


class TestSessions:
    def test_upload_detects_all_vendors(self, client, fixture_dir):
        sid = client.post("/sessions").json()["session_id"]
        files = [("files", (p.name, p.read_bytes(), "text/csv"))
                 for p in sorted(fixture_dir.iterdir())]
        body = client.post(f"/sessions/{sid}/files", files=files).json()
        vendors = {f["vendor"] for f in body["files"]}
        assert vendors == {"samsung", "apple", "fitbit", "xiaomi"}

    def test_unknown_format_file_becomes_diagnostic(self, client, fixture_dir):
        sid = client.post("/sessions").json()["session_id"]
        files = [
            ("files", ("good.csv", (fixture_dir / "fitbit_heart_rate.csv").read_bytes(), "text/csv")),
            ("files", ("weird.csv", b"alien,columns\n1,2\n", "text/csv")),
        ]
        body = client.post(f"/sessions/{sid}/files", files=files).json()
        assert len(body["files"]) == 1
        assert any("unknown-format" in d for d in body["diagnostics"])

    def test_empty_upload_is_bad_request(self, client):
        sid = client.post("/sessions").json()["session_id"]
        r = client.post(f"/sessions/{sid}/files")
        assert r.status_code == 400
        assert r.json()["code"] == "bad-request"

    def test_unknown_session_404(self, client):
        r = client.post("/sessions/nope/files")
        assert r.status_code == 404
        assert r.json()["code"] == "not-found"

    def test_integrate_with_no_records_fails_session(self, client):
        sid = client.post("/sessions").json()["session_id"]
        files = [("files", ("w.csv", b"alien,cols\n1,2\n", "text/csv"))]
        client.post(f"/sessions/{sid}/files", files=files)
        r = client.post(f"/sessions/{sid}/integrate")
        assert r.status_code == 422
        assert r.json()["code"] == "no-records"

    def test_integrate_persists_dataset(self, client, fixture_dir):
        out = upload_and_integrate(client, fixture_dir)
        assert out["frame_count"] > 0
        listed = client.get("/datasets").json()["datasets"]
        assert [m["dataset_id"] for m in listed] == [out["dataset_id"]]

    def test_interval_density_monotonicity(self, client, fixture_dir):
        n10 = upload_and_integrate(client, fixture_dir, interval=10)["frame_count"]
        n30 = upload_and_integrate(client, fixture_dir, interval=30)["frame_count"]
        assert n30 <= n10

    def test_repeat_integration_same_frames(self, client, fixture_dir):
        a = upload_and_integrate(client, fixture_dir)
        b = upload_and_integrate(client, fixture_dir)
        assert a["dataset_id"] != b["dataset_id"]
        fa = client.get(f"/datasets/{a['dataset_id']}/frames").json()["rows"]
        fb = client.get(f"/datasets/{b['dataset_id']}/frames").json()["rows"]
        assert fa == fb

    def test_bad_interval_rejected(self, client, fixture_dir):
        sid = client.post("/sessions").json()["session_id"]
        files = [("files", ("f.csv", (fixture_dir / "fitbit_heart_rate.csv").read_bytes(), "text/csv"))]
        client.post(f"/sessions/{sid}/files", files=files)
        r = client.post(f"/sessions/{sid}/integrate", params={"interval": 7})
        assert r.status_code == 400


class TestFramesQuery:
    def test_window_query_returns_all_frames(self, client, fixture_dir):
        out = upload_and_integrate(client, fixture_dir)
        rows = client.get(f"/datasets/{out['dataset_id']}/frames").json()["rows"]
        assert len(rows) == out["frame_count"]
        starts = [r["window_start"] for r in rows]
        assert starts == sorted(starts)

    def test_daily_query_counts_study_days(self, client):
        ds = integrate(study_period_records(), WindowGrid(10), dataset_id="tb1")
        DatasetStore(client.data_dir).save(ds)
        rows = client.get("/datasets/tb1/frames", params={"granularity": "daily"}).json()["rows"]
        assert len(rows) == STUDY_DAYS

    def test_range_outside_span_is_empty(self, client, fixture_dir):
        out = upload_and_integrate(client, fixture_dir)
        rows = client.get(
            f"/datasets/{out['dataset_id']}/frames",
            params={"from": "1999-01-01", "to": "1999-01-02"},
        ).json()["rows"]
        assert rows == []

    def test_inverted_range_is_bad_request(self, client, fixture_dir):
        out = upload_and_integrate(client, fixture_dir)
        r = client.get(
            f"/datasets/{out['dataset_id']}/frames",
            params={"from": "2024-03-16", "to": "2024-03-15"},
        )
        assert r.status_code == 400

    def test_bad_granularity(self, client, fixture_dir):
        out = upload_and_integrate(client, fixture_dir)
        r = client.get(f"/datasets/{out['dataset_id']}/frames", params={"granularity": "weekly"})
        assert r.status_code == 400

    def test_unknown_dataset_404(self, client):
        assert client.get("/datasets/nope/frames").status_code == 404


class TestQuality:
    def test_report_shape(self, client, fixture_dir):
        out = upload_and_integrate(client, fixture_dir)
        body = client.get(f"/datasets/{out['dataset_id']}/quality").json()
        assert set(body) == {"completeness", "recency", "plausibility", "wear"}

    def test_planted_hr_outlier_reported(self, client, fixture_dir):
        extra = fixture_dir / "fitbit_heart_rate.csv"
        extra.write_text(extra.read_text() + "03/15/24 23:55:00,240\n")
        out = upload_and_integrate(client, fixture_dir)
        body = client.get(f"/datasets/{out['dataset_id']}/quality").json()
        outliers = body["plausibility"]["hr_outliers"]
        assert len(outliers) == 1 and outliers[0]["bpm"] == 240

    def test_zero_lookback_is_bad_request(self, client, fixture_dir):
        out = upload_and_integrate(client, fixture_dir)
        r = client.get(f"/datasets/{out['dataset_id']}/quality", params={"lookback_days": 0})
        assert r.status_code == 400

    def test_repeat_get_identical_bodies(self, client, fixture_dir):
        out = upload_and_integrate(client, fixture_dir)
        url = f"/datasets/{out['dataset_id']}/quality"
        assert client.get(url).content == client.get(url).content


class TestFilterAndExport:
    def test_filter_and_named_export(self, client):
        ds = integrate(study_period_records(), WindowGrid(10), dataset_id="tb1")
        DatasetStore(client.data_dir).save(ds)
        body = client.post(
            "/datasets/tb1/filter",
            json={"min_steps_per_day": 15466, "name": "active-days"},
        ).json()
        assert len(body["kept_dates"]) + len(body["dropped_dates"]) == STUDY_DAYS
        assert all(d["reason"] == "steps" for d in body["dropped_dates"])
        csv_filtered = client.get("/datasets/tb1/export.csv", params={"filter": "active-days"})
        assert csv_filtered.status_code == 200
        kept = set(body["kept_dates"])
        data_rows = csv_filtered.text.strip().splitlines()[1:]
        assert {r[:10] for r in data_rows} == kept

    def test_unfiltered_export_matches_empty_spec(self, client):
        ds = integrate(study_period_records(), WindowGrid(10), dataset_id="tb1")
        DatasetStore(client.data_dir).save(ds)
        client.post("/datasets/tb1/filter", json={"name": "noop"})
        plain = client.get("/datasets/tb1/export.csv").content
        named = client.get("/datasets/tb1/export.csv", params={"filter": "noop"}).content
        assert plain == named

    def test_unknown_filter_name_404(self, client):
        ds = integrate(study_period_records(), WindowGrid(10), dataset_id="tb1")
        DatasetStore(client.data_dir).save(ds)
        r = client.get("/datasets/tb1/export.csv", params={"filter": "missing"})
        assert r.status_code == 404

    def test_invalid_spec_is_bad_request(self, client):
        ds = integrate(study_period_records(), WindowGrid(10), dataset_id="tb1")
        DatasetStore(client.data_dir).save(ds)
        r = client.post("/datasets/tb1/filter", json={"hr_bounds": [220, 25]})
        assert r.status_code == 400
        r = client.post("/datasets/tb1/filter", json={"bogus_field": 1})
        assert r.status_code == 400

    def test_filter_does_not_mutate_dataset(self, client):
        ds = integrate(study_period_records(), WindowGrid(10), dataset_id="tb1")
        DatasetStore(client.data_dir).save(ds)
        before = client.get("/datasets/tb1/export.csv").content
        client.post("/datasets/tb1/filter", json={"min_steps_per_day": 10_000_000})
        assert client.get("/datasets/tb1/export.csv").content == before


class TestAuth:
    def test_token_required_when_configured(self, tmp_path):
        app = create_app(data_dir=str(tmp_path), token="sekrit")
        with TestClient(app) as c:
            assert c.get("/datasets").status_code == 401
            assert c.get("/datasets", headers={"Authorization": "Bearer wrong"}).status_code == 401
            ok = c.get("/datasets", headers={"Authorization": "Bearer sekrit"})
            assert ok.status_code == 200

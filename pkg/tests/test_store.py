import random
from datetime import datetime, timedelta

import pytest
from hypothesis import given, settings, strategies as st

from vital.model import (
    CanonicalFrame,
    Dataset,
    ItemKind,
    SleepStage,
    VendorKind,
    WindowGrid,
)
from vital.quality import FilterSpec
from vital.store import (
    CSV_HEADER,
    CsvParseError,
    CsvSchemaError,
    DatasetStore,
    NotFoundError,
    SourceFile,
    export_canonical_csv,
    import_canonical_csv,
)

DAY = datetime(2024, 3, 15)


def frame(window, vendor=VendorKind.fitbit, **kw):
    f = CanonicalFrame(window_start=window, **kw)
    for item in f.present_items():
        f.sources[item] = vendor
    return f


def dataset(frames, interval=10, dataset_id="t"):
    return Dataset(dataset_id=dataset_id, timezone="Asia/Seoul", grid=WindowGrid(interval),
                   frames=sorted(frames, key=lambda f: f.window_start))


def random_dataset(rng, interval=10, max_frames=20):
    frames = []
    used = rng.sample(range(0, 400), rng.randint(1, max_frames))
    for k in sorted(used):
        kw = {}
        if rng.random() < 0.6:
            kw["steps"] = rng.randint(0, 2000)
        if rng.random() < 0.5:
            kw["heart_rate_bpm"] = rng.randint(30, 200)
        if rng.random() < 0.3:
            kw["spo2_percent"] = rng.randint(85, 100)
        if rng.random() < 0.4:
            kw["activity_minutes"] = rng.randint(0, interval)
        if rng.random() < 0.3:
            kw["sleep_minutes"] = rng.randint(1, interval)
            if rng.random() < 0.7:
                kw["sleep_stage"] = rng.choice(list(SleepStage))
        if not kw:
            kw["steps"] = 0
        f = CanonicalFrame(window_start=DAY + timedelta(minutes=interval * k), **kw)
        for item in f.present_items():
            f.sources[item] = rng.choice(list(VendorKind))
        frames.append(f)
    return dataset(frames, interval)


class TestExportCsv:
    def test_exact_row_serialization(self):
        f = frame(DAY.replace(hour=8), steps=200, heart_rate_bpm=75)
        body = export_canonical_csv(dataset([f])).decode()
        assert body == CSV_HEADER + "\n2024-03-15 08:00:00,200,,,75,,,,fitbit\n"

    def test_empty_dataset_is_header_only(self):
        body = export_canonical_csv(dataset([])).decode()
        assert body == CSV_HEADER + "\n"

    def test_rows_sorted_even_if_frames_disordered(self):
        a = frame(DAY.replace(hour=9), steps=1)
        b = frame(DAY.replace(hour=8), steps=2)
        ds = Dataset(dataset_id="t", timezone="Asia/Seoul", grid=WindowGrid(10), frames=[a, b])
        lines = export_canonical_csv(ds).decode().splitlines()
        assert lines[1].startswith("2024-03-15 08:00:00")

    def test_mixed_vendor_sources_field(self):
        f = frame(DAY, steps=10)
        f.heart_rate_bpm = 70
        f.sources[ItemKind.heart_rate] = VendorKind.samsung
        line = export_canonical_csv(dataset([f])).decode().splitlines()[1]
        assert line.endswith("steps=fitbit;heart_rate=samsung")

    def test_deterministic_bytes(self):
        ds = random_dataset(random.Random(1))
        assert export_canonical_csv(ds) == export_canonical_csv(ds)

    def test_filter_applied_when_spec_given(self):
        frames = [frame(DAY + timedelta(days=i, hours=8), steps=1000 * i) for i in range(3)]
        body = export_canonical_csv(dataset(frames), FilterSpec(min_steps_per_day=1000))
        assert body.decode().count("\n") == 3  # header + 2 kept days

    def test_lf_line_endings_utf8(self):
        body = export_canonical_csv(dataset([frame(DAY, steps=1)]))
        assert b"\r" not in body
        body.decode("utf-8")


class TestImportCsv:
    def test_round_trip_identity(self):
        ds = random_dataset(random.Random(2))
        back = import_canonical_csv(export_canonical_csv(ds), grid=ds.grid)
        assert [self._strip(f) for f in back.frames] == [self._strip(f) for f in ds.frames]

    @staticmethod
    def _strip(f):
        return (f.window_start, f.steps, f.activity_minutes, f.exercise_minutes,
                f.heart_rate_bpm, f.spo2_percent, f.sleep_minutes, f.sleep_stage, f.sources)

    def test_alien_header_rejected(self):
        with pytest.raises(CsvSchemaError):
            import_canonical_csv(b"a,b,c\n1,2,3\n")

    def test_stage_without_minutes_rejected(self):
        row = "2024-03-15 08:00:00,,,,,,,deep,fitbit"
        with pytest.raises(CsvParseError):
            import_canonical_csv((CSV_HEADER + "\n" + row + "\n").encode())

    def test_malformed_row_carries_line_number(self):
        row = "2024-03-15 08:00:00,abc,,,,,,,fitbit"
        with pytest.raises(CsvParseError, match="line 2"):
            import_canonical_csv((CSV_HEADER + "\n" + row + "\n").encode())

    @settings(max_examples=50, deadline=None)
    @given(seed=st.integers(0, 100_000))
    def test_round_trip_property(self, seed):
        ds = random_dataset(random.Random(seed))
        back = import_canonical_csv(export_canonical_csv(ds), grid=ds.grid)
        assert [self._strip(f) for f in back.frames] == [self._strip(f) for f in ds.frames]


class TestDatasetStore:
    def test_save_load_bit_equality(self, tmp_path):
        store = DatasetStore(tmp_path)
        ds = random_dataset(random.Random(3), max_frames=30)
        ds.dataset_id = "abc"
        store.save(ds)
        loaded = store.load("abc")
        assert loaded == ds  # dataclass equality covers every field incl. sample_counts

    def test_save_load_preserves_sample_counts(self, tmp_path):
        store = DatasetStore(tmp_path)
        f = frame(DAY, heart_rate_bpm=70)
        f.sample_counts[ItemKind.heart_rate] = 5
        ds = dataset([f], dataset_id="d1")
        store.save(ds)
        assert store.load("d1").frames[0].sample_counts == {ItemKind.heart_rate: 5}

    def test_load_unknown_id(self, tmp_path):
        with pytest.raises(NotFoundError):
            DatasetStore(tmp_path).load("nope")

    def test_delete_then_list(self, tmp_path):
        store = DatasetStore(tmp_path)
        ds = dataset([frame(DAY, steps=1)], dataset_id="gone")
        store.save(ds)
        assert [m["dataset_id"] for m in store.list()] == ["gone"]
        store.delete("gone")
        assert store.list() == []
        with pytest.raises(NotFoundError):
            store.delete("gone")

    def test_list_returns_manifests_without_frames(self, tmp_path):
        store = DatasetStore(tmp_path)
        store.save(dataset([frame(DAY, steps=1)], dataset_id="m1"),
                   source_files=[SourceFile("a.csv", "fitbit", 10, "deadbeef")])
        (manifest,) = store.list()
        assert manifest["frame_count"] == 1
        assert manifest["source_files"][0]["name"] == "a.csv"
        assert "frames" not in manifest

    def test_named_filter_specs(self, tmp_path):
        store = DatasetStore(tmp_path)
        store.save(dataset([frame(DAY, steps=1)], dataset_id="d"))
        spec = FilterSpec(min_wear_minutes_per_day=1080, min_steps_per_day=500)
        store.save_filter_spec("d", "strict", spec)
        assert store.load_filter_spec("d", "strict") == spec
        with pytest.raises(NotFoundError):
            store.load_filter_spec("d", "missing")

    def test_overwrite_is_atomic_swap(self, tmp_path):
        store = DatasetStore(tmp_path)
        ds1 = dataset([frame(DAY, steps=1)], dataset_id="d")
        ds2 = dataset([frame(DAY, steps=2), frame(DAY + timedelta(minutes=10), steps=3)],
                      dataset_id="d")
        store.save(ds1)
        store.save(ds2)
        assert store.load("d") == ds2
        assert not list(tmp_path.glob(".tmp-*"))

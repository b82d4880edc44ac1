import json

import pytest
from click.testing import CliRunner

from vital.cli import main
from vital.fixtures import wear_scenario_records, write_vendor_fixtures
from vital.integrate import integrate
from vital.model import WindowGrid
from vital.store import DatasetStore


@pytest.fixture()
def runner():
    return CliRunner()


@pytest.fixture()
def fixture_dir(tmp_path):
    d = tmp_path / "exports"
    write_vendor_fixtures(d)
    return d


@pytest.fixture()
def wear_dataset_dir(tmp_path):
    ds = integrate(wear_scenario_records(), WindowGrid(10), dataset_id="wear")
    DatasetStore(tmp_path).save(ds)
    return tmp_path / "wear"


class TestIntegrateCommand:
    def test_integrates_fixture_directory(self, runner, fixture_dir, tmp_path):
        out = tmp_path / "ds1"
        result = runner.invoke(main, [
            "integrate", "--in", str(fixture_dir), "--tz", "Asia/Seoul",
            "--interval", "10", "--out", str(out),
        ])
        assert result.exit_code == 0, result.output
        assert (out / "manifest.json").is_file()
        ds = DatasetStore(tmp_path).load("ds1")
        assert len(ds.frames) > 0

    def test_empty_directory_fails_nonzero(self, runner, tmp_path):
        empty = tmp_path / "empty"
        empty.mkdir()
        result = runner.invoke(main, [
            "integrate", "--in", str(empty), "--out", str(tmp_path / "ds"),
        ])
        assert result.exit_code != 0

    def test_bad_interval_fails(self, runner, fixture_dir, tmp_path):
        result = runner.invoke(main, [
            "integrate", "--in", str(fixture_dir), "--interval", "7",
            "--out", str(tmp_path / "ds"),
        ])
        assert result.exit_code != 0


class TestQualityCommand:
    def test_prints_json_report(self, runner, wear_dataset_dir):
        result = runner.invoke(main, ["quality", str(wear_dataset_dir)])
        assert result.exit_code == 0, result.output
        tree = json.loads(result.output)
        assert set(tree) == {"completeness", "recency", "plausibility", "wear"}
        assert len(tree["wear"]["per_day_minutes"]) == 3

    def test_lookback_option(self, runner, wear_dataset_dir):
        result = runner.invoke(main, ["quality", str(wear_dataset_dir), "--lookback-days", "7"])
        assert json.loads(result.output)["recency"]["lookback_days"] == 7


class TestFilterCommand:
    def test_18_hour_wear_filter(self, runner, wear_dataset_dir, tmp_path):
        out_csv = tmp_path / "out.csv"
        result = runner.invoke(main, [
            "filter", str(wear_dataset_dir), "--min-wear-hours", "18",
            "--export", str(out_csv),
        ])
        assert result.exit_code == 0, result.output
        assert "dropped 2024-03-01: wear" in result.output
        assert "kept 2024-03-02" in result.output and "kept 2024-03-03" in result.output
        dates = {line[:10] for line in out_csv.read_text().splitlines()[1:]}
        assert dates == {"2024-03-02", "2024-03-03"}

    def test_step_filter(self, runner, wear_dataset_dir):
        result = runner.invoke(main, ["filter", str(wear_dataset_dir), "--min-steps", "1001"])
        assert result.exit_code == 0
        assert "0 days kept, 3 days dropped" in result.output

    def test_not_a_dataset_dir(self, runner, tmp_path):
        result = runner.invoke(main, ["filter", str(tmp_path)])
        assert result.exit_code != 0

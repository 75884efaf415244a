"""CLI subcommands: thin-wrapper identity with the library, synth
determinism, and error exit codes."""

import hashlib
import json
from pathlib import Path

import pytest

from agrigeo.cli import main
from agrigeo.geotiff import read_geotiff
from agrigeo.indices import normalized_difference
from agrigeo.vector import filter_by_crop, read_geojson
from agrigeo.zonal import records_from_csv, zonal_statistics


def run(args):
    return main(args)


def hash_dir(path: Path) -> dict:
    return {
        p.name: hashlib.sha256(p.read_bytes()).hexdigest()
        for p in sorted(path.iterdir())
    }


@pytest.fixture
def scene_dir(tmp_path):
    out = tmp_path / "scene"
    assert run(["synth", "--fields", "20", "--size", "96x96", "--seed", "42",
                "--out-dir", str(out)]) == 0
    return out


class TestSynth:
    def test_deterministic_across_runs(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            assert run(["synth", "--fields", "12", "--size", "64x64", "--seed", "42",
                        "--out-dir", str(out)]) == 0
        assert hash_dir(a) == hash_dir(b)

    def test_seed_changes_output(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        run(["synth", "--fields", "12", "--size", "64x64", "--seed", "1", "--out-dir", str(a)])
        run(["synth", "--fields", "12", "--size", "64x64", "--seed", "2", "--out-dir", str(b)])
        assert hash_dir(a) != hash_dir(b)

    def test_bad_size_exits_1(self, tmp_path, capsys):
        assert run(["synth", "--fields", "3", "--size", "junk",
                    "--out-dir", str(tmp_path / "x")]) == 1
        err = capsys.readouterr().err
        assert json.loads(err.strip())["error"]


class TestNdvi:
    def test_matches_library(self, scene_dir, tmp_path):
        out = tmp_path / "ndvi.tif"
        assert run(["ndvi", "--nir", str(scene_dir / "band08.tif"),
                    "--red", str(scene_dir / "band04.tif"), "--out", str(out)]) == 0
        nir = read_geotiff((scene_dir / "band08.tif").read_bytes())
        red = read_geotiff((scene_dir / "band04.tif").read_bytes())
        assert read_geotiff(out.read_bytes()) == normalized_difference(nir, red)


class TestZonal:
    def test_crop_filter_delegation(self, scene_dir, tmp_path):
        ndvi = tmp_path / "ndvi.tif"
        run(["ndvi", "--nir", str(scene_dir / "band08.tif"),
             "--red", str(scene_dir / "band04.tif"), "--out", str(ndvi)])
        out = tmp_path / "records.csv"
        assert run(["zonal", "--raster", str(ndvi), "--fields",
                    str(scene_dir / "fields.geojson"), "--crop", "winter wheat",
                    "--out", str(out)]) == 0
        fc = read_geojson((scene_dir / "fields.geojson").read_text(), crop_key="crop")
        expected = zonal_statistics(
            read_geotiff(ndvi.read_bytes()), filter_by_crop(fc, "winter wheat")
        )
        assert records_from_csv(out.read_text()) == expected


class TestHistogramClassify:
    @pytest.fixture
    def records_csv(self, scene_dir, tmp_path):
        ndvi = tmp_path / "ndvi.tif"
        run(["ndvi", "--nir", str(scene_dir / "band08.tif"),
             "--red", str(scene_dir / "band04.tif"), "--out", str(ndvi)])
        out = tmp_path / "records.csv"
        run(["zonal", "--raster", str(ndvi), "--fields",
             str(scene_dir / "fields.geojson"), "--out", str(out)])
        return out

    def test_histogram_csv(self, records_csv, tmp_path):
        out = tmp_path / "hist.csv"
        assert run(["histogram", "--records", str(records_csv), "--metric", "mean",
                    "--bins", "10", "--out", str(out)]) == 0
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "bin_index,bin_lo,bin_hi,count"
        counts = [int(line.split(",")[-1]) for line in lines[1:]]
        assert sum(counts) == 20

    def test_histogram_svg(self, records_csv, tmp_path):
        out = tmp_path / "hist.svg"
        assert run(["histogram", "--records", str(records_csv), "--out", str(out)]) == 0
        assert out.read_text().startswith("<svg")

    def test_classify_quantiles(self, records_csv, tmp_path):
        out = tmp_path / "classes.csv"
        assert run(["classify", "--records", str(records_csv), "--quantiles", "4",
                    "--out", str(out)]) == 0
        rows = out.read_text().strip().splitlines()[1:]
        classes = [int(r.split(",")[1]) for r in rows]
        assert set(classes) == {0, 1, 2, 3}

    def test_classify_breaks(self, records_csv, tmp_path):
        out = tmp_path / "classes.csv"
        assert run(["classify", "--records", str(records_csv), "--breaks", "0.0,0.5",
                    "--out", str(out)]) == 0
        assert out.read_text().splitlines()[0] == "field_id,class"


class TestPrescribe:
    def test_outputs(self, scene_dir, tmp_path):
        ndvi = tmp_path / "ndvi.tif"
        run(["ndvi", "--nir", str(scene_dir / "band08.tif"),
             "--red", str(scene_dir / "band04.tif"), "--out", str(ndvi)])
        out = tmp_path / "presc.tif"
        summary = tmp_path / "summary.json"
        assert run(["prescribe", "--ndvi", str(ndvi),
                    "--fields", str(scene_dir / "fields.geojson"),
                    "--field-id", "0", "--breaks", "0.3,0.6", "--rates", "120,90,60",
                    "--uniform-rate", "100", "--out", str(out),
                    "--summary", str(summary)]) == 0
        presc = read_geotiff(out.read_bytes())
        assert presc.is_float
        body = json.loads(summary.read_text())
        assert body["summary"]["uniform_total"] == pytest.approx(
            100 * body["summary"]["area_ha"]
        )


class TestInfo:
    def test_raster_info(self, scene_dir, capsys):
        assert run(["info", str(scene_dir / "band08.tif")]) == 0
        body = json.loads(capsys.readouterr().out)
        assert body["kind"] == "raster"
        assert body["width"] == 96 and body["epsg_code"] == 25832

    def test_vector_info(self, scene_dir, capsys):
        assert run(["info", str(scene_dir / "fields.geojson")]) == 0
        body = json.loads(capsys.readouterr().out)
        assert body["kind"] == "vector" and body["feature_count"] == 20

    def test_missing_file_exits_1(self, tmp_path, capsys):
        assert run(["info", str(tmp_path / "nope.tif")]) == 1
        assert json.loads(capsys.readouterr().err.strip())["error"]


class TestUsageErrors:
    def test_unknown_subcommand_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            run(["frobnicate"])
        assert exc.value.code == 2

    def test_missing_required_flag_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            run(["ndvi", "--nir", "a.tif"])
        assert exc.value.code == 2

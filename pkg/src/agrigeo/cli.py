"""Command-line front end: the offline pipeline plus the service runner.

Every subcommand is a thin wrapper over the library modules; outputs are
identical to calling those operations directly. Usage errors exit 2
(argparse), processing errors exit 1 with one JSON line on stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

from .errors import AgrigeoError
from .geotiff import read_geotiff, write_geotiff
from .indices import normalized_difference
from .prescription import application_summary, build_prescription
from .synth import write_scene
from .vector import filter_by_crop, read_geojson, read_shapefile
from .zonal import (
    classify_fixed,
    classify_quantiles,
    histogram,
    records_from_csv,
    records_to_csv,
    zonal_statistics,
)

HIST_DEFAULTS = {"mean": (-1.0, 1.0), "std": (0.0, 0.5)}


def _load_raster(path: str):
    return read_geotiff(Path(path).read_bytes())


def _load_fields(path: str, crop_key: str, epsg: int | None):
    p = Path(path)
    if p.suffix.lower() == ".shp":
        dbf = p.with_suffix(".dbf")
        prj = p.with_suffix(".prj")
        collection = read_shapefile(
            p.read_bytes(),
            dbf.read_bytes() if dbf.is_file() else b"",
            prj.read_text() if prj.is_file() else None,
            crop_key,
        )
        if epsg is not None:
            from dataclasses import replace

            from .vector import FeatureCollection

            collection = FeatureCollection(
                tuple(replace(f, epsg_code=epsg) for f in collection), epsg
            )
        return collection
    return read_geojson(p.read_text(), epsg, crop_key)


def _raster_info(path: str) -> dict:
    r = _load_raster(path)
    g = r.georef
    nodata = r.nodata
    if nodata is not None and math.isnan(nodata):
        nodata = "nan"  # keep the JSON standard-parseable
    return {
        "kind": "raster",
        "width": r.width,
        "height": r.height,
        "sample_kind": "float32" if r.is_float else "uint16",
        "nodata": nodata,
        "epsg_code": g.epsg_code,
        "origin": [g.origin_x, g.origin_y],
        "pixel_size": [g.pixel_size_x, g.pixel_size_y],
        "bbox": list(r.bbox()),
    }


def _vector_info(path: str, crop_key: str, epsg: int | None) -> dict:
    c = _load_fields(path, crop_key, epsg)
    crops = sorted({f.crop_code for f in c if f.crop_code})
    boxes = [f.geometry.bbox() for f in c]
    bbox = (
        [min(b[0] for b in boxes), min(b[1] for b in boxes),
         max(b[2] for b in boxes), max(b[3] for b in boxes)]
        if boxes
        else [0, 0, 0, 0]
    )
    return {
        "kind": "vector",
        "feature_count": len(c),
        "epsg_code": c.epsg_code,
        "crops": crops,
        "bbox": bbox,
    }


def cmd_info(args) -> int:
    path = Path(args.path)
    if path.suffix.lower() in (".tif", ".tiff"):
        info = _raster_info(args.path)
    else:
        info = _vector_info(args.path, args.crop_key, args.epsg)
    print(json.dumps(info, indent=2))
    return 0


def cmd_ndvi(args) -> int:
    nir = _load_raster(args.nir)
    red = _load_raster(args.red)
    out = normalized_difference(nir, red)
    Path(args.out).write_bytes(write_geotiff(out))
    return 0


def cmd_zonal(args) -> int:
    raster = _load_raster(args.raster)
    fields = _load_fields(args.fields, args.crop_key, args.epsg)
    if args.crop:
        fields = filter_by_crop(fields, args.crop)
    records = zonal_statistics(raster, fields)
    Path(args.out).write_text(records_to_csv(records))
    return 0


def cmd_histogram(args) -> int:
    records = records_from_csv(Path(args.records).read_text())
    lo_default, hi_default = HIST_DEFAULTS[args.metric]
    lo = args.lo if args.lo is not None else lo_default
    hi = args.hi if args.hi is not None else hi_default
    values = [getattr(r, args.metric) for r in records if getattr(r, args.metric) is not None]
    h = histogram(values, lo, hi, args.bins)
    out = Path(args.out)
    if out.suffix.lower() == ".svg":
        out.write_text(_histogram_svg(h, args.metric))
    else:
        lines = ["bin_index,bin_lo,bin_hi,count"]
        lines.append(f"-1,,{h.lo!r},{h.underflow}")
        w = (h.hi - h.lo) / h.n_bins
        for i, count in enumerate(h.counts):
            lines.append(f"{i},{h.lo + i * w!r},{h.lo + (i + 1) * w!r},{count}")
        lines.append(f"{h.n_bins},{h.hi!r},,{h.overflow}")
        out.write_text("\n".join(lines) + "\n")
    return 0


def _histogram_svg(h, label: str) -> str:
    width, height, pad = 640, 360, 40
    peak = max(max(h.counts), 1)
    bar_w = (width - 2 * pad) / h.n_bins
    bars = []
    for i, count in enumerate(h.counts):
        bh = (height - 2 * pad) * count / peak
        x = pad + i * bar_w
        bars.append(
            f'<rect x="{x:.2f}" y="{height - pad - bh:.2f}" width="{bar_w:.2f}" '
            f'height="{bh:.2f}" fill="#4c8c2b" stroke="white" stroke-width="0.5"/>'
        )
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">'
        f'<rect width="{width}" height="{height}" fill="white"/>'
        + "".join(bars)
        + f'<text x="{width / 2}" y="{height - 8}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="14">{label} ({h.lo} .. {h.hi})</text>'
        "</svg>"
    )


def cmd_classify(args) -> int:
    records = records_from_csv(Path(args.records).read_text())
    if args.breaks:
        breaks = [float(b) for b in args.breaks.split(",")]
        classes = classify_fixed(records, breaks)
    else:
        classes = classify_quantiles(records, args.quantiles)
    lines = ["field_id,class"]
    for field_id, cls in classes:
        lines.append(f"{field_id},{'' if cls is None else cls}")
    Path(args.out).write_text("\n".join(lines) + "\n")
    return 0


def cmd_prescribe(args) -> int:
    ndvi = _load_raster(args.ndvi)
    fields = _load_fields(args.fields, args.crop_key, args.epsg)
    field = fields.get(args.field_id)
    if field is None:
        raise AgrigeoError(f"no field with id {args.field_id}")
    breaks = [float(b) for b in args.breaks.split(",")]
    rates = [float(r) for r in args.rates.split(",")]
    presc = build_prescription(ndvi, field, breaks, rates)
    Path(args.out).write_bytes(write_geotiff(presc.zone_raster))
    if args.summary:
        body = {
            "field_id": presc.field_id,
            "breaks": list(presc.breaks),
            "rates": list(presc.rates),
            "pixel_area_ha": presc.pixel_area_ha,
            "total_amount": presc.total_amount,
        }
        if args.uniform_rate is not None:
            body["summary"] = application_summary(presc, args.uniform_rate, args.unit_cost)
        Path(args.summary).write_text(json.dumps(body, indent=2))
    return 0


def cmd_synth(args) -> int:
    try:
        w, h = (int(v) for v in args.size.lower().split("x"))
    except ValueError:
        raise AgrigeoError(f"--size must look like 256x256, got {args.size!r}") from None
    paths = write_scene(args.fields, w, h, args.seed, args.out_dir)
    print(json.dumps(paths, indent=2))
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    port = args.port if args.port is not None else int(os.environ.get("AGRIGEO_PORT", "8000"))
    data_dir = args.data_dir or os.environ.get("AGRIGEO_DATA_DIR", "./agrigeo-data")
    app = create_app(data_dir)
    uvicorn.run(app, host=args.host, port=port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="agrigeo")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("info", help="print raster/vector metadata as JSON")
    p.add_argument("path")
    p.add_argument("--crop-key", default="crop")
    p.add_argument("--epsg", type=int)
    p.set_defaults(func=cmd_info)

    p = sub.add_parser("ndvi", help="compute the normalized-difference raster")
    p.add_argument("--nir", required=True)
    p.add_argument("--red", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ndvi)

    p = sub.add_parser("zonal", help="per-field statistics to CSV")
    p.add_argument("--raster", required=True)
    p.add_argument("--fields", required=True)
    p.add_argument("--crop")
    p.add_argument("--crop-key", default="crop")
    p.add_argument("--epsg", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_zonal)

    p = sub.add_parser("histogram", help="bin per-field statistics")
    p.add_argument("--records", required=True)
    p.add_argument("--metric", choices=("mean", "std"), default="mean")
    p.add_argument("--lo", type=float)
    p.add_argument("--hi", type=float)
    p.add_argument("--bins", type=int, default=50)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_histogram)

    p = sub.add_parser("classify", help="classify fields by mean value")
    p.add_argument("--records", required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--breaks")
    g.add_argument("--quantiles", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("prescribe", help="build a variable-rate application map")
    p.add_argument("--ndvi", required=True)
    p.add_argument("--fields", required=True)
    p.add_argument("--field-id", type=int, required=True)
    p.add_argument("--breaks", required=True)
    p.add_argument("--rates", required=True)
    p.add_argument("--uniform-rate", type=float)
    p.add_argument("--unit-cost", type=float, default=1.0)
    p.add_argument("--crop-key", default="crop")
    p.add_argument("--epsg", type=int)
    p.add_argument("--out", required=True)
    p.add_argument("--summary")
    p.set_defaults(func=cmd_prescribe)

    p = sub.add_parser("synth", help="generate a deterministic synthetic scene")
    p.add_argument("--fields", type=int, required=True)
    p.add_argument("--size", default="256x256")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("serve", help="run the catalog HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int)
    p.add_argument("--data-dir")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except AgrigeoError as exc:
        print(
            json.dumps({"error": type(exc).__name__, "detail": str(exc)}),
            file=sys.stderr,
        )
        return 1
    except OSError as exc:
        print(json.dumps({"error": "IOError", "detail": str(exc)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

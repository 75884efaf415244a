"""HTTP catalog and analysis gateway (FastAPI).

Simplified REST analogs of WMS/WFS: layer upload/browse, native-CRS
tiles, bbox/crop feature queries, zonal stats, histograms, and
prescription building. All failures are structured JSON
{"error": name, "detail": text} with a mapped status code.
"""

from __future__ import annotations

import dataclasses
import json
from pathlib import Path

from fastapi import FastAPI, File, Request, Response, UploadFile
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import errors as E
from .catalog import Catalog, UnknownLayerError
from .geotiff import read_geotiff
from .indices import ColorRamp, NAMED_RAMPS
from .prescription import application_summary, build_prescription
from .tiles import TileAddress, render_tile
from .vector import (
    FeatureCollection,
    collection_to_geojson,
    filter_by_crop,
    read_geojson,
    read_shapefile,
)
from .zonal import histogram, records_to_json, zonal_statistics

_ERROR_MAP: dict[type, tuple[int, str]] = {
    E.TruncatedError: (400, "Truncated"),
    E.BadMagicError: (400, "BadMagic"),
    E.UnsupportedLayoutError: (400, "UnsupportedLayout"),
    E.UnsupportedCompressionError: (400, "UnsupportedCompression"),
    E.MissingGeoreferenceError: (400, "MissingGeoreference"),
    E.ParseError: (400, "ParseError"),
    E.UnsupportedGeometryError: (400, "UnsupportedGeometry"),
    E.BadHeaderError: (400, "BadHeader"),
    E.UnsupportedShapeTypeError: (400, "UnsupportedShapeType"),
    E.RecordCountMismatchError: (400, "RecordCountMismatch"),
    E.ShapeMismatchError: (400, "ShapeMismatch"),
    E.GeoreferenceMismatchError: (400, "GeoreferenceMismatch"),
    E.CrsMismatchError: (409, "CrsMismatch"),
    E.BadRangeError: (400, "BadRange"),
    E.BadBinsError: (400, "BadBins"),
    E.BadBreaksError: (400, "BadBreaks"),
    E.RateLengthMismatchError: (400, "RateLengthMismatch"),
    E.EmptyFieldError: (400, "EmptyField"),
}


class ServiceError(Exception):
    def __init__(self, status: int, name: str, detail: str):
        self.status = status
        self.name = name
        self.detail = detail
        super().__init__(detail)


def _error_response(status: int, name: str, detail: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": name, "detail": detail})


class PrescriptionRequest(BaseModel):
    raster_id: str
    vector_id: str
    field_id: int
    breaks: list[float]
    rates: list[float]
    uniform_rate: float | None = None
    unit_cost: float = 1.0


def _parse_bbox(text: str) -> tuple[float, float, float, float]:
    parts = text.split(",")
    if len(parts) != 4:
        raise ServiceError(400, "MalformedBbox", f"bbox needs 4 numbers, got {text!r}")
    try:
        minx, miny, maxx, maxy = (float(p) for p in parts)
    except ValueError:
        raise ServiceError(400, "MalformedBbox", f"bbox not numeric: {text!r}") from None
    if minx > maxx or miny > maxy:
        raise ServiceError(400, "MalformedBbox", f"bbox not well-ordered: {text!r}")
    return (minx, miny, maxx, maxy)


def _boxes_intersect(a, b) -> bool:
    return not (a[2] < b[0] or b[2] < a[0] or a[3] < b[1] or b[3] < a[1])


def create_app(data_dir: str | Path) -> FastAPI:
    app = FastAPI(title="agrigeo catalog")
    catalog = Catalog(data_dir)
    app.state.catalog = catalog

    @app.exception_handler(ServiceError)
    async def _service_error(request: Request, exc: ServiceError):
        return _error_response(exc.status, exc.name, exc.detail)

    @app.exception_handler(E.AgrigeoError)
    async def _toolkit_error(request: Request, exc: E.AgrigeoError):
        status, name = _ERROR_MAP.get(type(exc), (400, type(exc).__name__))
        return _error_response(status, name, str(exc))

    @app.exception_handler(UnknownLayerError)
    async def _unknown_layer(request: Request, exc: UnknownLayerError):
        return _error_response(404, "UnknownLayer", f"no layer {exc.args[0]!r}")

    @app.exception_handler(RequestValidationError)
    async def _validation(request: Request, exc: RequestValidationError):
        return _error_response(400, "Validation", str(exc.errors()))

    def _require(layer_id: str, kind: str):
        entry = catalog.get_entry(layer_id)
        if entry.kind != kind:
            name = "NotARaster" if kind == "raster" else "NotAVector"
            raise ServiceError(400, name, f"layer {layer_id} is a {entry.kind}")
        return entry

    @app.post("/layers")
    async def post_layer(
        name: str,
        format: str,
        file: UploadFile = File(...),
        dbf: UploadFile | None = File(None),
        prj: UploadFile | None = File(None),
        epsg: int | None = None,
        crop_key: str = "crop",
    ):
        payload = await file.read()
        if format == "geotiff":
            raster = read_geotiff(payload)
            entry = catalog.ingest_raster(name, raster, "geotiff")
        elif format == "geojson":
            collection = read_geojson(payload.decode("utf-8"), epsg, crop_key)
            entry = catalog.ingest_vector(name, collection, "geojson")
        elif format == "shapefile":
            dbf_bytes = await dbf.read() if dbf is not None else b""
            prj_text = (await prj.read()).decode("utf-8") if prj is not None else None
            collection = read_shapefile(payload, dbf_bytes, prj_text, crop_key)
            if epsg is not None:
                collection = FeatureCollection(
                    tuple(dataclasses.replace(f, epsg_code=epsg) for f in collection), epsg
                )
            if collection.epsg_code == 0:
                raise ServiceError(
                    409, "CrsUnknown", "shapefile has no EPSG (no PRJ) and no override given"
                )
            entry = catalog.ingest_vector(name, collection, "shapefile")
        else:
            raise ServiceError(400, "UnknownFormat", f"format {format!r}")
        return entry.as_dict()

    @app.get("/layers")
    def list_layers():
        return [e.as_dict() for e in catalog.list_entries()]

    @app.get("/layers/{layer_id}")
    def get_layer(layer_id: str):
        return catalog.get_entry(layer_id).as_dict()

    @app.get("/tiles/{layer_id}/{z}/{x}/{y}.png")
    def get_tile(layer_id: str, z: int, x: int, y: int, ramp: str = "ndvi"):
        _require(layer_id, "raster")
        address = TileAddress(z, x, y)
        if not address.in_bounds():
            raise ServiceError(404, "TileOutOfRange", f"tile {z}/{x}/{y} outside pyramid")
        if ramp in NAMED_RAMPS:
            ramp_obj = NAMED_RAMPS[ramp]
        else:
            try:
                spec = json.loads(ramp)
                ramp_obj = ColorRamp(
                    stops=tuple(tuple(s) for s in spec["stops"]),
                    nodata_color=tuple(spec.get("nodata_color", (0, 0, 0, 0))),
                )
            except (ValueError, KeyError, TypeError):
                raise ServiceError(
                    400, "UnknownRamp", f"ramp must be one of {sorted(NAMED_RAMPS)} or inline JSON"
                ) from None
        raster = catalog.load_raster(layer_id)
        data = render_tile(raster, address, ramp_obj)
        return Response(content=data, media_type="image/png")

    @app.get("/features/{layer_id}")
    def get_features(layer_id: str, bbox: str | None = None, crop: str | None = None):
        _require(layer_id, "vector")
        collection = catalog.load_vector(layer_id)
        features = list(collection.features)
        if bbox is not None:
            box = _parse_bbox(bbox)
            features = [f for f in features if _boxes_intersect(f.geometry.bbox(), box)]
        filtered = FeatureCollection(tuple(features), collection.epsg_code)
        if crop is not None:
            filtered = filter_by_crop(filtered, crop)
        return json.loads(collection_to_geojson(filtered))

    @app.get("/stats/zonal")
    def stats_zonal(raster: str, vector: str, crop: str | None = None):
        _require(raster, "raster")
        _require(vector, "vector")
        grid = catalog.load_raster(raster)
        collection = catalog.load_vector(vector)
        if crop is not None:
            collection = filter_by_crop(collection, crop)
        records = zonal_statistics(grid, collection)
        return json.loads(records_to_json(records))

    @app.get("/stats/histogram")
    def stats_histogram(
        raster: str,
        vector: str,
        metric: str = "mean",
        lo: float | None = None,
        hi: float | None = None,
        bins: int = 50,
        crop: str | None = None,
    ):
        if metric not in ("mean", "std"):
            raise ServiceError(400, "Validation", f"metric must be mean or std, got {metric!r}")
        _require(raster, "raster")
        _require(vector, "vector")
        grid = catalog.load_raster(raster)
        collection = catalog.load_vector(vector)
        if crop is not None:
            collection = filter_by_crop(collection, crop)
        records = zonal_statistics(grid, collection)
        values = [getattr(r, metric) for r in records if getattr(r, metric) is not None]
        if lo is None:
            lo = -1.0 if metric == "mean" else 0.0
        if hi is None:
            hi = 1.0 if metric == "mean" else 0.5
        return histogram(values, lo, hi, bins).as_dict()

    @app.post("/prescriptions")
    def post_prescription(req: PrescriptionRequest):
        _require(req.raster_id, "raster")
        _require(req.vector_id, "vector")
        ndvi = catalog.load_raster(req.raster_id)
        collection = catalog.load_vector(req.vector_id)
        field = collection.get(req.field_id)
        if field is None:
            raise ServiceError(404, "UnknownField", f"no field {req.field_id} in {req.vector_id}")
        presc = build_prescription(ndvi, field, req.breaks, req.rates)
        entry = catalog.ingest_raster(
            f"prescription-{req.vector_id}-{req.field_id}", presc.zone_raster, "geotiff"
        )
        body = {
            "layer_id": entry.layer_id,
            "field_id": presc.field_id,
            "breaks": list(presc.breaks),
            "rates": list(presc.rates),
            "pixel_area_ha": presc.pixel_area_ha,
            "total_amount": presc.total_amount,
        }
        if req.uniform_rate is not None:
            body["summary"] = application_summary(presc, req.uniform_rate, req.unit_cost)
        return body

    return app

"""File-directory layer catalog.

One subdirectory per layer holding the canonical payload plus a JSON
metadata sidecar. Ingestion stages into a temp directory and renames it
into place, so a layer is only ever visible fully written. Layers are
immutable once ingested, which makes the in-process read cache trivial.
"""

from __future__ import annotations

import json
import os
import shutil
import uuid
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from .geotiff import read_geotiff, write_geotiff
from .raster import Raster
from .tiles import suggested_max_zoom
from .vector import FeatureCollection, collection_to_geojson, read_geojson


class UnknownLayerError(KeyError):
    pass


@dataclass(frozen=True)
class CatalogEntry:
    layer_id: str
    name: str
    kind: str  # "raster" | "vector"
    epsg_code: int
    bbox: tuple[float, float, float, float]  # (min_x, min_y, max_x, max_y)
    created_at: str
    source_format: str  # "geotiff" | "geojson" | "shapefile"
    max_zoom: int | None = None  # rasters only

    def as_dict(self) -> dict:
        d = {
            "layer_id": self.layer_id,
            "name": self.name,
            "kind": self.kind,
            "epsg_code": self.epsg_code,
            "bbox": list(self.bbox),
            "created_at": self.created_at,
            "source_format": self.source_format,
        }
        if self.max_zoom is not None:
            d["max_zoom"] = self.max_zoom
        return d


def _entry_from_dict(d: dict) -> CatalogEntry:
    return CatalogEntry(
        layer_id=d["layer_id"],
        name=d["name"],
        kind=d["kind"],
        epsg_code=d["epsg_code"],
        bbox=tuple(d["bbox"]),
        created_at=d["created_at"],
        source_format=d["source_format"],
        max_zoom=d.get("max_zoom"),
    )


def _vector_bbox(collection: FeatureCollection):
    boxes = [f.geometry.bbox() for f in collection.features]
    if not boxes:
        return (0.0, 0.0, 0.0, 0.0)
    return (
        min(b[0] for b in boxes),
        min(b[1] for b in boxes),
        max(b[2] for b in boxes),
        max(b[3] for b in boxes),
    )


class Catalog:
    def __init__(self, data_dir: str | Path):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self._raster_cache: dict[str, Raster] = {}
        self._vector_cache: dict[str, FeatureCollection] = {}

    def _layer_dir(self, layer_id: str) -> Path:
        return self.data_dir / layer_id

    def ingest_raster(self, name: str, raster: Raster, source_format: str = "geotiff") -> CatalogEntry:
        layer_id = uuid.uuid4().hex[:12]
        entry = CatalogEntry(
            layer_id=layer_id,
            name=name,
            kind="raster",
            epsg_code=raster.georef.epsg_code,
            bbox=raster.bbox(),
            created_at=datetime.now(timezone.utc).isoformat(),
            source_format=source_format,
            max_zoom=suggested_max_zoom(raster),
        )
        self._commit(layer_id, entry, {"raster.tif": write_geotiff(raster)})
        self._raster_cache[layer_id] = raster
        return entry

    def ingest_vector(
        self, name: str, collection: FeatureCollection, source_format: str = "geojson"
    ) -> CatalogEntry:
        layer_id = uuid.uuid4().hex[:12]
        entry = CatalogEntry(
            layer_id=layer_id,
            name=name,
            kind="vector",
            epsg_code=collection.epsg_code,
            bbox=_vector_bbox(collection),
            created_at=datetime.now(timezone.utc).isoformat(),
            source_format=source_format,
        )
        payload = collection_to_geojson(collection).encode("utf-8")
        self._commit(layer_id, entry, {"features.geojson": payload})
        self._vector_cache[layer_id] = collection
        return entry

    def _commit(self, layer_id: str, entry: CatalogEntry, files: dict[str, bytes]):
        tmp = self.data_dir / f".tmp-{layer_id}"
        tmp.mkdir(parents=True)
        try:
            for fname, data in files.items():
                (tmp / fname).write_bytes(data)
            (tmp / "meta.json").write_text(json.dumps(entry.as_dict(), indent=2))
            os.rename(tmp, self._layer_dir(layer_id))
        except BaseException:
            shutil.rmtree(tmp, ignore_errors=True)
            raise

    def list_entries(self) -> list[CatalogEntry]:
        entries = []
        for child in sorted(self.data_dir.iterdir()):
            meta = child / "meta.json"
            if child.name.startswith(".") or not meta.is_file():
                continue
            entries.append(_entry_from_dict(json.loads(meta.read_text())))
        entries.sort(key=lambda e: (e.created_at, e.layer_id))
        return entries

    def get_entry(self, layer_id: str) -> CatalogEntry:
        meta = self._layer_dir(layer_id) / "meta.json"
        if not meta.is_file():
            raise UnknownLayerError(layer_id)
        return _entry_from_dict(json.loads(meta.read_text()))

    def load_raster(self, layer_id: str) -> Raster:
        if layer_id not in self._raster_cache:
            path = self._layer_dir(layer_id) / "raster.tif"
            if not path.is_file():
                raise UnknownLayerError(layer_id)
            self._raster_cache[layer_id] = read_geotiff(path.read_bytes())
        return self._raster_cache[layer_id]

    def load_vector(self, layer_id: str) -> FeatureCollection:
        if layer_id not in self._vector_cache:
            path = self._layer_dir(layer_id) / "features.geojson"
            if not path.is_file():
                raise UnknownLayerError(layer_id)
            # canonical form embeds epsg and stores crop under "crop_code"
            self._vector_cache[layer_id] = read_geojson(
                path.read_text(), crop_key="crop_code"
            )
        return self._vector_cache[layer_id]

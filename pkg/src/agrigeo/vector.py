"""Field polygon intake: GeoJSON and ESRI Shapefile (+DBF, optional PRJ).

Both formats normalize to FeatureCollection. A feature's interior is
defined by the even-odd rule over all of its rings jointly, so ring
orientation conventions (shapefile CW exteriors vs GeoJSON CCW) never
matter downstream.
"""

from __future__ import annotations

import json
import re
import struct
from dataclasses import dataclass, field

from .errors import (
    BadHeaderError,
    ParseError,
    RecordCountMismatchError,
    TruncatedError,
    UnsupportedGeometryError,
    UnsupportedShapeTypeError,
)

Ring = list[tuple[float, float]]


@dataclass(frozen=True)
class PolygonGeometry:
    """One or more closed rings; interior = even-odd over all rings."""

    rings: tuple[tuple[tuple[float, float], ...], ...]

    def __post_init__(self):
        if not self.rings:
            raise ValueError("polygon needs at least one ring")
        closed = []
        for ring in self.rings:
            ring = [(float(x), float(y)) for x, y in ring]
            if ring and ring[0] != ring[-1]:
                ring.append(ring[0])
            if len(ring) < 4:
                raise ValueError(f"ring with {len(ring)} vertices, need >= 4 closed")
            closed.append(tuple(ring))
        object.__setattr__(self, "rings", tuple(closed))

    def bbox(self) -> tuple[float, float, float, float]:
        xs = [x for ring in self.rings for x, _ in ring]
        ys = [y for ring in self.rings for _, y in ring]
        return (min(xs), min(ys), max(xs), max(ys))

    def even_odd_area(self) -> float:
        """Area of the even-odd interior (holes subtract)."""
        return even_odd_area(self.rings)

    def contains(self, x: float, y: float) -> bool:
        """Even-odd ray-cast membership over all rings."""
        inside = False
        for ring in self.rings:
            for (x1, y1), (x2, y2) in zip(ring[:-1], ring[1:]):
                if (y1 > y) != (y2 > y) and x < x1 + (y - y1) * (x2 - x1) / (y2 - y1):
                    inside = not inside
        return inside


def shoelace_area(ring) -> float:
    """Absolute shoelace area of one closed ring."""
    s = 0.0
    for (x1, y1), (x2, y2) in zip(ring[:-1], ring[1:]):
        s += x1 * y2 - x2 * y1
    return abs(s) / 2.0


def even_odd_area(rings) -> float:
    """Area of the even-odd interior, for rings that do not cross each
    other: each ring contributes +/- its shoelace area by nesting parity."""
    areas = [shoelace_area(r) for r in rings]
    signed = 0.0
    for i, ring in enumerate(rings):
        # nesting depth = number of other rings containing this ring;
        # rings never cross, so one vertex decides containment
        px, py = ring[0]
        depth = sum(
            1 for j, other in enumerate(rings) if j != i and _ring_contains(other, px, py)
        )
        signed += areas[i] if depth % 2 == 0 else -areas[i]
    return signed


def _ring_contains(ring, x, y) -> bool:
    inside = False
    for (x1, y1), (x2, y2) in zip(ring[:-1], ring[1:]):
        if (y1 > y) != (y2 > y) and x < x1 + (y - y1) * (x2 - x1) / (y2 - y1):
            inside = not inside
    return inside


@dataclass(frozen=True)
class FieldFeature:
    id: int
    geometry: PolygonGeometry
    crop_code: str
    attributes: dict
    epsg_code: int


@dataclass(frozen=True)
class FeatureCollection:
    features: tuple[FieldFeature, ...]
    epsg_code: int

    def __len__(self):
        return len(self.features)

    def __iter__(self):
        return iter(self.features)

    def get(self, feature_id: int) -> FieldFeature | None:
        for f in self.features:
            if f.id == feature_id:
                return f
        return None


# --- GeoJSON ---

def read_geojson(
    text: str, epsg_override: int | None = None, crop_key: str = "crop"
) -> FeatureCollection:
    """Parse a GeoJSON FeatureCollection of Polygon/MultiPolygon features."""
    try:
        doc = json.loads(text)
    except (json.JSONDecodeError, TypeError) as exc:
        raise ParseError(f"malformed GeoJSON: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("type") != "FeatureCollection":
        raise ParseError("GeoJSON root must be a FeatureCollection")

    if epsg_override is not None:
        epsg = int(epsg_override)
    elif isinstance(doc.get("epsg"), int):
        epsg = doc["epsg"]  # embedded code from our canonical writer
    else:
        epsg = 4326

    features = []
    for i, feat in enumerate(doc.get("features", [])):
        geom = feat.get("geometry") or {}
        gtype = geom.get("type")
        if gtype == "Polygon":
            rings = list(geom.get("coordinates", []))
        elif gtype == "MultiPolygon":
            rings = [ring for part in geom.get("coordinates", []) for ring in part]
        else:
            raise UnsupportedGeometryError(
                f"feature {i}: geometry type {gtype!r}, only Polygon/MultiPolygon"
            )
        props = feat.get("properties") or {}
        crop = props.get(crop_key, "")
        features.append(
            FieldFeature(
                id=i,
                geometry=PolygonGeometry(tuple(tuple((float(x), float(y)) for x, y in r) for r in rings)),
                crop_code=str(crop) if crop is not None else "",
                attributes=dict(props),
                epsg_code=epsg,
            )
        )
    return FeatureCollection(tuple(features), epsg)


def collection_to_geojson(collection: FeatureCollection) -> str:
    """Canonical GeoJSON serialization with an embedded epsg field."""
    doc = {
        "type": "FeatureCollection",
        "epsg": collection.epsg_code,
        "features": [
            {
                "type": "Feature",
                "id": f.id,
                "properties": {"crop_code": f.crop_code, **f.attributes},
                "geometry": {
                    "type": "Polygon",
                    "coordinates": [[list(v) for v in ring] for ring in f.geometry.rings],
                },
            }
            for f in collection.features
        ],
    }
    return json.dumps(doc, sort_keys=True)


# --- Shapefile / DBF ---

SHAPE_NULL = 0
SHAPE_POLYGON = 5


def read_shapefile(
    shp: bytes, dbf: bytes, prj: str | None = None, crop_key: str = ""
) -> FeatureCollection:
    """Parse polygon shapefile records joined 1:1 with DBF attribute rows."""
    geometries = _parse_shp(shp)
    records = _parse_dbf(dbf)
    if len(geometries) != len(records):
        raise RecordCountMismatchError(
            f"shp has {len(geometries)} records, dbf has {len(records)}"
        )
    epsg = parse_prj_epsg(prj) if prj else 0
    features = []
    for i, (geom, attrs) in enumerate(zip(geometries, records)):
        crop = attrs.get(crop_key, "") if crop_key else ""
        features.append(
            FieldFeature(
                id=i,
                geometry=geom,
                crop_code=str(crop) if crop is not None else "",
                attributes=attrs,
                epsg_code=epsg,
            )
        )
    return FeatureCollection(tuple(features), epsg)


def parse_prj_epsg(prj: str) -> int:
    """Last AUTHORITY["EPSG","<code>"] occurrence in the WKT, else 0."""
    matches = re.findall(r'AUTHORITY\s*\[\s*"EPSG"\s*,\s*"(\d+)"\s*\]', prj)
    return int(matches[-1]) if matches else 0


def _parse_shp(shp: bytes) -> list[PolygonGeometry]:
    if len(shp) < 100:
        raise TruncatedError(f"shp main header needs 100 bytes, got {len(shp)}")
    file_code = struct.unpack(">i", shp[0:4])[0]
    version, shape_type = struct.unpack("<ii", shp[28:36])
    if file_code != 9994 or version != 1000:
        raise BadHeaderError(f"shp file code {file_code} / version {version}")
    if shape_type not in (SHAPE_NULL, SHAPE_POLYGON):
        raise UnsupportedShapeTypeError(f"shp declares shape type {shape_type}, only 5 (Polygon)")
    file_length = struct.unpack(">i", shp[24:28])[0] * 2  # 16-bit words
    geometries = []
    pos = 100
    while pos < min(file_length, len(shp)):
        if pos + 8 > len(shp):
            raise TruncatedError(f"record header at offset {pos} truncated")
        _recno, content_words = struct.unpack(">ii", shp[pos : pos + 8])
        pos += 8
        content = shp[pos : pos + content_words * 2]
        if len(content) < content_words * 2:
            raise TruncatedError(f"record content at offset {pos} truncated")
        pos += content_words * 2
        rec_type = struct.unpack("<i", content[0:4])[0]
        if rec_type == SHAPE_NULL:
            continue
        if rec_type != SHAPE_POLYGON:
            raise UnsupportedShapeTypeError(f"record shape type {rec_type}, only 5 (Polygon)")
        num_parts, num_points = struct.unpack("<ii", content[36:44])
        parts = struct.unpack(f"<{num_parts}i", content[44 : 44 + 4 * num_parts])
        pts_off = 44 + 4 * num_parts
        coords = struct.unpack(
            f"<{2 * num_points}d", content[pts_off : pts_off + 16 * num_points]
        )
        points = [(coords[2 * i], coords[2 * i + 1]) for i in range(num_points)]
        rings = []
        for pi, start in enumerate(parts):
            end = parts[pi + 1] if pi + 1 < num_parts else num_points
            rings.append(tuple(points[start:end]))
        geometries.append(PolygonGeometry(tuple(rings)))
    return geometries


def _parse_dbf(dbf: bytes) -> list[dict]:
    if len(dbf) < 32:
        raise TruncatedError(f"dbf header needs 32 bytes, got {len(dbf)}")
    version = dbf[0]
    if version & 0x07 != 0x03:
        raise BadHeaderError(f"dbf version byte 0x{version:02x}, expected dBASE III (0x03)")
    num_records, header_size, record_size = struct.unpack("<IHH", dbf[4:12])
    fields = []
    pos = 32
    while pos + 32 <= header_size and dbf[pos] != 0x0D:
        desc = dbf[pos : pos + 32]
        name = desc[0:11].split(b"\x00", 1)[0].decode("ascii", "replace")
        ftype = chr(desc[11])
        length = desc[16]
        fields.append((name, ftype, length))
        pos += 32
    records = []
    pos = header_size
    for _ in range(num_records):
        if pos + record_size > len(dbf):
            raise TruncatedError(f"dbf record at offset {pos} truncated")
        row = dbf[pos : pos + record_size]
        pos += record_size
        if row[0:1] == b"*":  # deleted record
            continue
        attrs = {}
        off = 1
        for name, ftype, length in fields:
            raw = row[off : off + length]
            off += length
            if ftype == "C":
                attrs[name] = raw.decode("latin-1").rstrip(" \x00")
            elif ftype == "N" or ftype == "F":
                text = raw.decode("ascii", "replace").strip()
                if not text:
                    attrs[name] = None
                elif "." in text or "e" in text or "E" in text:
                    attrs[name] = float(text)
                else:
                    try:
                        attrs[name] = int(text)
                    except ValueError:
                        attrs[name] = None
            else:
                attrs[name] = raw.decode("latin-1").rstrip()
        records.append(attrs)
    return records


# --- queries ---

def filter_by_crop(collection: FeatureCollection, crop_value: str) -> FeatureCollection:
    """Case-insensitive crop filter; order and ids preserved."""
    wanted = crop_value.casefold()
    kept = tuple(f for f in collection.features if f.crop_code.casefold() == wanted)
    return FeatureCollection(kept, collection.epsg_code)

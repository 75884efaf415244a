"""Shared fixtures: hand-built shapefile/DBF bytes, naive geometry
oracles, and small raster builders used across the suite."""

from __future__ import annotations

import struct

import numpy as np
import pytest

from agrigeo.raster import GridGeoreference, Raster


# --- naive oracles (kept deliberately independent of library internals) ---

def point_in_polygon_oracle(px: float, py: float, rings) -> bool:
    """Even-odd ray cast, one edge at a time, exactly the stated rule."""
    crossings = 0
    for ring in rings:
        for i in range(len(ring) - 1):
            x1, y1 = ring[i]
            x2, y2 = ring[i + 1]
            if (y1 > py) != (y2 > py) and px < x1 + (py - y1) * (x2 - x1) / (y2 - y1):
                crossings += 1
    return crossings % 2 == 1


def shoelace_oracle(ring) -> float:
    total = 0.0
    for i in range(len(ring) - 1):
        x1, y1 = ring[i]
        x2, y2 = ring[i + 1]
        total += x1 * y2 - x2 * y1
    return abs(total) / 2.0


def stats_oracle(values):
    """Two-pass population mean/std over a plain list of floats."""
    n = len(values)
    mean = sum(values) / n
    var = sum((v - mean) ** 2 for v in values) / n
    return mean, var ** 0.5, min(values), max(values)


# --- raster helpers ---

def make_georef(epsg=25832, origin=(600000.0, 6100000.0), pixel=10.0):
    return GridGeoreference(origin[0], origin[1], pixel, pixel, epsg)


def make_float_raster(values, nodata=None, georef=None):
    arr = np.asarray(values, dtype=np.float32)
    return Raster(
        width=arr.shape[1],
        height=arr.shape[0],
        samples=arr,
        georef=georef or make_georef(),
        nodata=nodata,
    )


# --- hand-built shapefile bytes (authored from the published layouts) ---

def build_shp(polygons, shape_type=5) -> bytes:
    """polygons: list of list-of-rings; each ring a closed vertex list."""
    records = b""
    for recno, rings in enumerate(polygons, start=1):
        points = [pt for ring in rings for pt in ring]
        parts = []
        offset = 0
        for ring in rings:
            parts.append(offset)
            offset += len(ring)
        xs = [x for x, _ in points]
        ys = [y for _, y in points]
        content = struct.pack("<i", shape_type)
        content += struct.pack("<4d", min(xs), min(ys), max(xs), max(ys))
        content += struct.pack("<ii", len(parts), len(points))
        content += struct.pack(f"<{len(parts)}i", *parts)
        for x, y in points:
            content += struct.pack("<2d", x, y)
        records += struct.pack(">ii", recno, len(content) // 2) + content

    file_length_words = (100 + len(records)) // 2
    all_pts = [pt for rings in polygons for ring in rings for pt in ring] or [(0.0, 0.0)]
    xs = [x for x, _ in all_pts]
    ys = [y for _, y in all_pts]
    header = struct.pack(">i", 9994) + b"\x00" * 20
    header += struct.pack(">i", file_length_words)
    header += struct.pack("<ii", 1000, shape_type)
    header += struct.pack("<4d", min(xs), min(ys), max(xs), max(ys))
    header += struct.pack("<4d", 0, 0, 0, 0)
    return header + records


def build_dbf(fields, rows) -> bytes:
    """fields: list of (name, type, length); rows: list of value lists."""
    descriptors = b""
    record_size = 1
    for name, ftype, length in fields:
        descriptors += name.encode("ascii").ljust(11, b"\x00")
        descriptors += ftype.encode("ascii")
        descriptors += b"\x00" * 4
        descriptors += bytes([length, 0])
        descriptors += b"\x00" * 14
        record_size += length
    header_size = 32 + len(descriptors) + 1
    out = bytes([0x03, 95, 7, 26])  # version, fake YMD stamp
    out += struct.pack("<IHH", len(rows), header_size, record_size)
    out += b"\x00" * 20
    out += descriptors + b"\x0d"
    for row in rows:
        rec = b" "
        for (name, ftype, length), value in zip(fields, row):
            if ftype == "C":
                rec += str(value).encode("latin-1").ljust(length, b" ")[:length]
            else:
                rec += str(value).encode("ascii").rjust(length, b" ")[:length]
        out += rec
    return out + b"\x1a"


def build_big_endian_geotiff(raster: Raster) -> bytes:
    """Independent big-endian (MM) writer used for endianness tests."""
    arr = raster.samples.astype(raster.samples.dtype.newbyteorder(">"))
    pix = arr.tobytes()
    g = raster.georef
    bits, fmt = (32, 3) if raster.samples.dtype == np.float32 else (16, 1)
    geokeys = (1, 1, 0, 2, 1024, 0, 1, 1, 3072, 0, 1, g.epsg_code)
    scale = struct.pack(">3d", g.pixel_size_x, g.pixel_size_y, 0.0)
    tie = struct.pack(">6d", 0, 0, 0, g.origin_x, g.origin_y, 0.0)
    keys = struct.pack(f">{len(geokeys)}H", *geokeys)
    entries = [
        (256, 4, 1, struct.pack(">I", raster.width)),
        (257, 4, 1, struct.pack(">I", raster.height)),
        (258, 3, 1, struct.pack(">H", bits)),
        (259, 3, 1, struct.pack(">H", 1)),
        (262, 3, 1, struct.pack(">H", 1)),
        (273, 4, 1, None),
        (278, 4, 1, struct.pack(">I", raster.height)),
        (279, 4, 1, struct.pack(">I", len(pix))),
        (339, 3, 1, struct.pack(">H", fmt)),
        (33550, 12, 3, scale),
        (33922, 12, 6, tie),
        (34735, 3, len(geokeys), keys),
    ]
    if raster.nodata is not None:
        nd = raster.nodata
        if nd != nd:
            text = "nan"
        elif float(nd).is_integer():
            text = str(int(nd))
        else:
            text = repr(float(nd))
        payload = text.encode("ascii") + b"\x00"
        entries.append((42113, 2, len(payload), payload))
    ifd_size = 2 + 12 * len(entries) + 4
    over_off = 8 + ifd_size
    overflow = b""
    packed = []
    for tag, ftype, count, payload in entries:
        if payload is None:
            packed.append((tag, ftype, count, None))
        elif len(payload) <= 4:
            packed.append((tag, ftype, count, payload.ljust(4, b"\x00")))
        else:
            packed.append((tag, ftype, count, struct.pack(">I", over_off + len(overflow))))
            overflow += payload
    data_off = over_off + len(overflow)
    out = b"MM" + struct.pack(">HI", 42, 8) + struct.pack(">H", len(packed))
    for tag, ftype, count, value in packed:
        if value is None:
            value = struct.pack(">I", data_off)
        out += struct.pack(">HHI", tag, ftype, count) + value
    return out + struct.pack(">I", 0) + overflow + pix


@pytest.fixture
def unit_square_rings():
    # 20 m x 20 m square anchored at the grid origin corner
    return [[(600000.0, 6099980.0), (600020.0, 6099980.0), (600020.0, 6100000.0),
             (600000.0, 6100000.0), (600000.0, 6099980.0)]]

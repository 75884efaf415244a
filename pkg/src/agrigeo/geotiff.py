"""GeoTIFF subset codec written from scratch on struct + zlib.

Reader side is permissive: classic TIFF, either byte order, strip or tile
layout, uncompressed or deflate, uint16 or float32 samples, one band.
Writer side is canonical: little-endian, uncompressed, one strip
(RowsPerStrip = height), so write -> read is the identity and output
bytes are stable for golden tests.
"""

from __future__ import annotations

import math
import struct
import zlib

import numpy as np

from .errors import (
    BadMagicError,
    MissingGeoreferenceError,
    TruncatedError,
    UnsupportedCompressionError,
    UnsupportedLayoutError,
)
from .raster import GridGeoreference, Raster

# TIFF tag codes used by this subset
TAG_IMAGE_WIDTH = 256
TAG_IMAGE_LENGTH = 257
TAG_BITS_PER_SAMPLE = 258
TAG_COMPRESSION = 259
TAG_PHOTOMETRIC = 262
TAG_STRIP_OFFSETS = 273
TAG_SAMPLES_PER_PIXEL = 277
TAG_ROWS_PER_STRIP = 278
TAG_STRIP_BYTE_COUNTS = 279
TAG_PLANAR_CONFIG = 284
TAG_PREDICTOR = 317
TAG_TILE_WIDTH = 322
TAG_TILE_LENGTH = 323
TAG_TILE_OFFSETS = 324
TAG_TILE_BYTE_COUNTS = 325
TAG_SAMPLE_FORMAT = 339
TAG_MODEL_PIXEL_SCALE = 33550
TAG_MODEL_TIEPOINT = 33922
TAG_GEO_KEY_DIRECTORY = 34735
TAG_GDAL_NODATA = 42113

GEOKEY_PROJECTED_CS_TYPE = 3072

# TIFF field type -> (struct letter, byte size)
_FIELD_TYPES = {
    1: ("B", 1),   # BYTE
    2: ("c", 1),   # ASCII
    3: ("H", 2),   # SHORT
    4: ("I", 4),   # LONG
    6: ("b", 1),   # SBYTE
    8: ("h", 2),   # SSHORT
    9: ("i", 4),   # SLONG
    11: ("f", 4),  # FLOAT
    12: ("d", 8),  # DOUBLE
}


def _slice(data: bytes, offset: int, size: int, what: str) -> bytes:
    if offset < 0 or offset + size > len(data):
        raise TruncatedError(
            f"{what}: need {size} bytes at offset {offset}, file has {len(data)}"
        )
    return data[offset : offset + size]


def _read_tag_values(data: bytes, bo: str, ftype: int, count: int, raw: bytes):
    """Decode one IFD entry's values; raw is its 4-byte value/offset field."""
    if ftype not in _FIELD_TYPES:
        return None  # unknown field type: skip tag
    letter, size = _FIELD_TYPES[ftype]
    total = size * count
    if total <= 4:
        payload = raw[:total]
    else:
        (offset,) = struct.unpack(bo + "I", raw)
        payload = _slice(data, offset, total, f"tag value (type {ftype})")
    if ftype == 2:
        return payload  # ASCII kept as bytes
    return struct.unpack(f"{bo}{count}{letter}", payload)


def _parse_ifd(data: bytes, bo: str, ifd_offset: int) -> dict[int, object]:
    (n_entries,) = struct.unpack(bo + "H", _slice(data, ifd_offset, 2, "IFD count"))
    tags: dict[int, object] = {}
    for i in range(n_entries):
        entry = _slice(data, ifd_offset + 2 + 12 * i, 12, f"IFD entry {i}")
        tag, ftype, count = struct.unpack(bo + "HHI", entry[:8])
        values = _read_tag_values(data, bo, ftype, count, entry[8:])
        if values is not None:
            tags[tag] = values
    return tags


def _tag_scalar(tags: dict, tag: int, default=None):
    if tag not in tags:
        return default
    values = tags[tag]
    return values[0]


def read_geotiff(data: bytes) -> Raster:
    """Decode a single-band classic GeoTIFF into a Raster."""
    header = _slice(data, 0, 8, "TIFF header")
    if header[:2] == b"II":
        bo = "<"
    elif header[:2] == b"MM":
        bo = ">"
    else:
        raise BadMagicError(f"not a TIFF: byte-order mark {header[:2]!r}")
    (magic,) = struct.unpack(bo + "H", header[2:4])
    if magic == 43:
        raise UnsupportedLayoutError("BigTIFF (magic 43) is not supported")
    if magic != 42:
        raise BadMagicError(f"bad TIFF magic {magic}, expected 42")
    (ifd_offset,) = struct.unpack(bo + "I", header[4:8])
    tags = _parse_ifd(data, bo, ifd_offset)

    width = _tag_scalar(tags, TAG_IMAGE_WIDTH)
    height = _tag_scalar(tags, TAG_IMAGE_LENGTH)
    if width is None or height is None:
        raise UnsupportedLayoutError("missing ImageWidth (256) or ImageLength (257)")
    width, height = int(width), int(height)

    spp = int(_tag_scalar(tags, TAG_SAMPLES_PER_PIXEL, 1))
    if spp != 1:
        raise UnsupportedLayoutError(f"SamplesPerPixel (277) = {spp}, only 1 supported")
    planar = int(_tag_scalar(tags, TAG_PLANAR_CONFIG, 1))
    if planar != 1:
        raise UnsupportedLayoutError(f"PlanarConfiguration (284) = {planar}, must be 1")
    predictor = int(_tag_scalar(tags, TAG_PREDICTOR, 1))
    if predictor != 1:
        raise UnsupportedLayoutError(f"Predictor (317) = {predictor} not supported")

    bits = int(_tag_scalar(tags, TAG_BITS_PER_SAMPLE, 1))
    sample_format = int(_tag_scalar(tags, TAG_SAMPLE_FORMAT, 1))
    if bits == 16 and sample_format == 1:
        dtype = np.dtype(bo + "u2")
    elif bits == 32 and sample_format == 3:
        dtype = np.dtype(bo + "f4")
    else:
        raise UnsupportedLayoutError(
            f"BitsPerSample (258) = {bits} with SampleFormat (339) = {sample_format};"
            " only uint16 and float32 supported"
        )

    compression = int(_tag_scalar(tags, TAG_COMPRESSION, 1))
    if compression not in (1, 8):
        raise UnsupportedCompressionError(
            f"Compression (259) = {compression}; only 1 (none) and 8 (deflate) supported"
        )

    if TAG_TILE_OFFSETS in tags:
        arr = _read_tiled(data, tags, width, height, dtype, compression)
    elif TAG_STRIP_OFFSETS in tags:
        arr = _read_stripped(data, tags, width, height, dtype, compression)
    else:
        raise UnsupportedLayoutError("neither StripOffsets (273) nor TileOffsets (324) present")

    georef = _parse_georeference(tags)
    nodata = _parse_nodata(tags)
    return Raster(
        width=width,
        height=height,
        samples=arr.astype(dtype.newbyteorder("=")),
        georef=georef,
        nodata=nodata,
    )


def _decode_block(data: bytes, offset: int, nbytes: int, compression: int, what: str) -> bytes:
    raw = _slice(data, int(offset), int(nbytes), what)
    if compression == 8:
        try:
            return zlib.decompress(raw)
        except zlib.error as exc:
            raise TruncatedError(f"{what}: bad deflate stream ({exc})") from exc
    return raw


def _read_stripped(data, tags, width, height, dtype, compression) -> np.ndarray:
    offsets = tags[TAG_STRIP_OFFSETS]
    if TAG_STRIP_BYTE_COUNTS not in tags:
        raise UnsupportedLayoutError("StripByteCounts (279) missing")
    counts = tags[TAG_STRIP_BYTE_COUNTS]
    rows_per_strip = int(_tag_scalar(tags, TAG_ROWS_PER_STRIP, height))
    if len(offsets) != len(counts):
        raise UnsupportedLayoutError("StripOffsets (273) / StripByteCounts (279) length mismatch")
    row_bytes = width * dtype.itemsize
    out = bytearray()
    row = 0
    for i, (off, cnt) in enumerate(zip(offsets, counts)):
        block = _decode_block(data, off, cnt, compression, f"strip {i}")
        rows_here = min(rows_per_strip, height - row)
        need = rows_here * row_bytes
        if len(block) < need:
            raise TruncatedError(f"strip {i}: {len(block)} bytes, expected {need}")
        out += block[:need]
        row += rows_here
    if row < height:
        raise TruncatedError(f"strips cover {row} rows, image has {height}")
    return np.frombuffer(bytes(out), dtype=dtype).reshape(height, width)


def _read_tiled(data, tags, width, height, dtype, compression) -> np.ndarray:
    tw = _tag_scalar(tags, TAG_TILE_WIDTH)
    th = _tag_scalar(tags, TAG_TILE_LENGTH)
    if tw is None or th is None:
        raise UnsupportedLayoutError("TileWidth (322) / TileLength (323) missing")
    tw, th = int(tw), int(th)
    offsets = tags[TAG_TILE_OFFSETS]
    if TAG_TILE_BYTE_COUNTS not in tags:
        raise UnsupportedLayoutError("TileByteCounts (325) missing")
    counts = tags[TAG_TILE_BYTE_COUNTS]
    across = (width + tw - 1) // tw
    down = (height + th - 1) // th
    if len(offsets) < across * down:
        raise UnsupportedLayoutError(
            f"TileOffsets (324): {len(offsets)} tiles, grid needs {across * down}"
        )
    out = np.zeros((height, width), dtype=dtype.newbyteorder("="))
    tile_bytes = tw * th * dtype.itemsize
    for ty in range(down):
        for tx in range(across):
            i = ty * across + tx
            block = _decode_block(data, offsets[i], counts[i], compression, f"tile {i}")
            if len(block) < tile_bytes:
                raise TruncatedError(f"tile {i}: {len(block)} bytes, expected {tile_bytes}")
            tile = np.frombuffer(block[:tile_bytes], dtype=dtype).reshape(th, tw)
            y0, x0 = ty * th, tx * tw
            h = min(th, height - y0)
            w = min(tw, width - x0)
            out[y0 : y0 + h, x0 : x0 + w] = tile[:h, :w]
    return out


def _parse_georeference(tags: dict) -> GridGeoreference:
    missing = [
        str(t)
        for t in (TAG_MODEL_PIXEL_SCALE, TAG_MODEL_TIEPOINT, TAG_GEO_KEY_DIRECTORY)
        if t not in tags
    ]
    if missing:
        raise MissingGeoreferenceError(
            f"georeferencing tags absent: {', '.join(missing)}"
        )
    scale = tags[TAG_MODEL_PIXEL_SCALE]
    tie = tags[TAG_MODEL_TIEPOINT]
    if len(scale) < 2 or len(tie) < 6:
        raise MissingGeoreferenceError(
            "ModelPixelScale (33550) needs 2+ values and ModelTiepoint (33922) needs 6"
        )
    sx, sy = float(scale[0]), float(scale[1])
    i, j, _k, x, y = (float(v) for v in tie[:5])
    # tiepoint anchors raster position (i,j); normalize to the (0,0) corner
    origin_x = x - i * sx
    origin_y = y + j * sy
    epsg = 0
    keys = tags[TAG_GEO_KEY_DIRECTORY]
    # entries of 4 shorts after the 4-short header
    for pos in range(4, len(keys) - 3, 4):
        key_id, location, count, value = keys[pos : pos + 4]
        if key_id == GEOKEY_PROJECTED_CS_TYPE and location == 0 and count == 1:
            epsg = int(value)
    return GridGeoreference(origin_x, origin_y, sx, sy, epsg)


def _parse_nodata(tags: dict) -> float | None:
    if TAG_GDAL_NODATA not in tags:
        return None
    text = tags[TAG_GDAL_NODATA].split(b"\x00", 1)[0].decode("ascii", "replace").strip()
    if not text:
        return None
    try:
        return float(text)
    except ValueError:
        return None


# --- canonical writer ---

def _nodata_text(nodata: float) -> str:
    if math.isnan(nodata):
        return "nan"
    if nodata == int(nodata) and abs(nodata) < 1e15:
        return str(int(nodata))
    return repr(float(nodata))


def write_geotiff(raster: Raster) -> bytes:
    """Encode a Raster as canonical little-endian uncompressed GeoTIFF."""
    arr = np.ascontiguousarray(raster.samples.astype(raster.samples.dtype.newbyteorder("<")))
    pixel_data = arr.tobytes()
    g = raster.georef
    if raster.is_float:
        bits, fmt = 32, 3
    else:
        bits, fmt = 16, 1

    geokeys = (
        1, 1, 0, 3,
        1024, 0, 1, 1,        # model type: projected
        1025, 0, 1, 1,        # raster space: pixel-is-area
        GEOKEY_PROJECTED_CS_TYPE, 0, 1, g.epsg_code,
    )
    scale = struct.pack("<3d", g.pixel_size_x, g.pixel_size_y, 0.0)
    tiepoint = struct.pack("<6d", 0.0, 0.0, 0.0, g.origin_x, g.origin_y, 0.0)
    geokey_bytes = struct.pack(f"<{len(geokeys)}H", *geokeys)

    # entries: (tag, field type, count, payload bytes)
    entries: list[tuple[int, int, int, bytes]] = [
        (TAG_IMAGE_WIDTH, 4, 1, struct.pack("<I", raster.width)),
        (TAG_IMAGE_LENGTH, 4, 1, struct.pack("<I", raster.height)),
        (TAG_BITS_PER_SAMPLE, 3, 1, struct.pack("<H", bits)),
        (TAG_COMPRESSION, 3, 1, struct.pack("<H", 1)),
        (TAG_PHOTOMETRIC, 3, 1, struct.pack("<H", 1)),
        (TAG_STRIP_OFFSETS, 4, 1, None),  # patched once data offset is known
        (TAG_SAMPLES_PER_PIXEL, 3, 1, struct.pack("<H", 1)),
        (TAG_ROWS_PER_STRIP, 4, 1, struct.pack("<I", raster.height)),
        (TAG_STRIP_BYTE_COUNTS, 4, 1, struct.pack("<I", len(pixel_data))),
        (TAG_PLANAR_CONFIG, 3, 1, struct.pack("<H", 1)),
        (TAG_SAMPLE_FORMAT, 3, 1, struct.pack("<H", fmt)),
        (TAG_MODEL_PIXEL_SCALE, 12, 3, scale),
        (TAG_MODEL_TIEPOINT, 12, 6, tiepoint),
        (TAG_GEO_KEY_DIRECTORY, 3, len(geokeys), geokey_bytes),
    ]
    if raster.nodata is not None:
        text = _nodata_text(raster.nodata).encode("ascii") + b"\x00"
        entries.append((TAG_GDAL_NODATA, 2, len(text), text))

    ifd_offset = 8
    ifd_size = 2 + 12 * len(entries) + 4
    overflow_offset = ifd_offset + ifd_size
    overflow = bytearray()
    packed = []
    for tag, ftype, count, payload in entries:
        if tag == TAG_STRIP_OFFSETS:
            packed.append((tag, ftype, count, None))
            continue
        if len(payload) <= 4:
            packed.append((tag, ftype, count, payload.ljust(4, b"\x00")))
        else:
            packed.append((tag, ftype, count, struct.pack("<I", overflow_offset + len(overflow))))
            overflow += payload

    data_offset = overflow_offset + len(overflow)
    out = bytearray()
    out += b"II" + struct.pack("<HI", 42, ifd_offset)
    out += struct.pack("<H", len(packed))
    for tag, ftype, count, value in packed:
        if tag == TAG_STRIP_OFFSETS:
            value = struct.pack("<I", data_offset)
        out += struct.pack("<HHI", tag, ftype, count) + value
    out += struct.pack("<I", 0)  # no further IFDs
    out += overflow
    out += pixel_data
    return bytes(out)

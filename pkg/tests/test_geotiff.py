"""GeoTIFF codec tests: cross-checks against Pillow as an independent
reference, round-trip identity, endianness, deflate, and error totality."""

import io
import struct
import zlib

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from PIL import Image, TiffImagePlugin

from agrigeo.errors import (
    BadMagicError,
    MissingGeoreferenceError,
    TruncatedError,
    UnsupportedCompressionError,
    UnsupportedLayoutError,
)
from agrigeo.geotiff import read_geotiff, write_geotiff
from agrigeo.raster import GridGeoreference, Raster

from conftest import build_big_endian_geotiff as _big_endian_variant
from conftest import make_float_raster, make_georef


def pillow_geotiff_bytes(array, scale=(10.0, 10.0), tiepoint=(600000.0, 6100000.0),
                         epsg=25832, nodata=None):
    """Reference fixture writer: Pillow, not our codec."""
    if array.dtype == np.float32:
        im = Image.fromarray(array, mode="F")
    else:
        im = Image.fromarray(array.astype(np.uint16))
    ifd = TiffImagePlugin.ImageFileDirectory_v2()
    ifd[33550] = (scale[0], scale[1], 0.0)
    ifd.tagtype[33550] = 12
    ifd[33922] = (0.0, 0.0, 0.0, tiepoint[0], tiepoint[1], 0.0)
    ifd.tagtype[33922] = 12
    ifd[34735] = (1, 1, 0, 2, 1024, 0, 1, 1, 3072, 0, 1, epsg)
    ifd.tagtype[34735] = 3
    if nodata is not None:
        ifd[42113] = nodata
        ifd.tagtype[42113] = 2
    buf = io.BytesIO()
    im.save(buf, format="TIFF", tiffinfo=ifd)
    return buf.getvalue()


class TestReadReferenceFixtures:
    def test_float32_fixture_from_reference_tool(self):
        arr = np.array([[0.1, 0.2], [0.3, 0.4]], dtype=np.float32)
        raster = read_geotiff(pillow_geotiff_bytes(arr))
        assert raster.width == 2 and raster.height == 2
        assert np.array_equal(raster.samples, arr)
        g = raster.georef
        assert (g.origin_x, g.origin_y) == (600000.0, 6100000.0)
        assert (g.pixel_size_x, g.pixel_size_y) == (10.0, 10.0)
        assert g.epsg_code == 25832
        assert raster.nodata is None

    def test_uint16_fixture(self):
        arr = np.array([[0, 1000], [2000, 65535]], dtype=np.uint16)
        raster = read_geotiff(pillow_geotiff_bytes(arr))
        assert raster.samples.dtype == np.uint16
        assert raster.samples.tolist() == arr.tolist()

    def test_nodata_tag(self):
        arr = np.zeros((2, 2), dtype=np.float32)
        raster = read_geotiff(pillow_geotiff_bytes(arr, nodata="-9999"))
        assert raster.nodata == -9999.0

    def test_reference_tool_reads_our_output(self):
        raster = make_float_raster([[1.5, 2.5], [3.5, 4.5]], nodata=-9999.0)
        im = Image.open(io.BytesIO(write_geotiff(raster)))
        assert np.array(im).tolist() == raster.samples.tolist()
        assert tuple(im.tag_v2[33550])[:2] == (10.0, 10.0)
        assert tuple(im.tag_v2[33922])[3:5] == (600000.0, 6100000.0)
        assert im.tag_v2[42113].rstrip("\x00") == "-9999"


def _strip_tags(data: bytes, drop: set[int]) -> bytes:
    """Hide IFD entries by renaming their tag to an unknown private code,
    keeping every byte offset in the file valid."""
    ifd_off = struct.unpack("<I", data[4:8])[0]
    n = struct.unpack("<H", data[ifd_off : ifd_off + 2])[0]
    out = bytearray(data)
    junk = 60000
    for i in range(n):
        pos = ifd_off + 2 + 12 * i
        tag = struct.unpack("<H", data[pos : pos + 2])[0]
        if tag in drop:
            out[pos : pos + 2] = struct.pack("<H", junk)
            junk += 1
    return bytes(out)


def _set_tag_value(data: bytes, tag: int, value: int) -> bytes:
    ifd_off = struct.unpack("<I", data[4:8])[0]
    n = struct.unpack("<H", data[ifd_off : ifd_off + 2])[0]
    out = bytearray(data)
    for i in range(n):
        pos = ifd_off + 2 + 12 * i
        if struct.unpack("<H", data[pos : pos + 2])[0] == tag:
            out[pos + 8 : pos + 12] = struct.pack("<I", value)
    return bytes(out)


class TestReadErrors:
    def test_not_a_tiff(self):
        with pytest.raises(BadMagicError):
            read_geotiff(b"GARBAGE-NOT-TIFF")

    def test_truncated(self):
        data = write_geotiff(make_float_raster([[1.0]]))
        with pytest.raises(TruncatedError):
            read_geotiff(data[:-2])

    def test_missing_georeference(self):
        data = write_geotiff(make_float_raster([[1.0, 2.0], [3.0, 4.0]]))
        broken = _strip_tags(data, {33550, 33922})
        with pytest.raises(MissingGeoreferenceError) as exc:
            read_geotiff(broken)
        assert "33550" in str(exc.value)

    def test_unsupported_compression(self):
        data = write_geotiff(make_float_raster([[1.0, 2.0], [3.0, 4.0]]))
        lzw = _set_tag_value(data, 259, 5)
        with pytest.raises(UnsupportedCompressionError) as exc:
            read_geotiff(lzw)
        assert "5" in str(exc.value)

    def test_bigtiff_rejected(self):
        with pytest.raises(UnsupportedLayoutError):
            read_geotiff(b"II+\x00" + b"\x00" * 12)

    def test_multiband_rejected(self):
        data = write_geotiff(make_float_raster([[1.0]]))
        multi = _set_tag_value(data, 277, 3)
        with pytest.raises(UnsupportedLayoutError):
            read_geotiff(multi)

    def test_unsupported_bit_depth(self):
        arr = np.array([[1, 2], [3, 4]], dtype=np.uint8)
        im = Image.fromarray(arr, mode="L")
        buf = io.BytesIO()
        ifd = TiffImagePlugin.ImageFileDirectory_v2()
        ifd[33550] = (10.0, 10.0, 0.0)
        ifd.tagtype[33550] = 12
        ifd[33922] = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
        ifd.tagtype[33922] = 12
        ifd[34735] = (1, 1, 0, 1, 3072, 0, 1, 25832)
        ifd.tagtype[34735] = 3
        im.save(buf, format="TIFF", tiffinfo=ifd)
        with pytest.raises(UnsupportedLayoutError):
            read_geotiff(buf.getvalue())


class TestWriter:
    def test_header_is_little_endian_classic(self):
        data = write_geotiff(make_float_raster([[1.0]]))
        assert data[:4] == b"\x49\x49\x2a\x00"

    def test_round_trip_with_negative_nodata(self):
        raster = make_float_raster([[1.0, -9999.0], [3.0, 4.0]], nodata=-9999.0)
        again = read_geotiff(write_geotiff(raster))
        assert again.nodata == -9999.0
        assert again == raster

    def test_round_trip_nan_nodata(self):
        raster = make_float_raster([[1.0, float("nan")]], nodata=float("nan"))
        again = read_geotiff(write_geotiff(raster))
        assert again == raster
        assert np.isnan(again.nodata)

    def test_round_trip_uint16(self):
        arr = np.array([[0, 65535], [123, 999]], dtype=np.uint16)
        raster = Raster(width=2, height=2, samples=arr, georef=make_georef(), nodata=0)
        assert read_geotiff(write_geotiff(raster)) == raster


@st.composite
def rasters(draw):
    width = draw(st.integers(1, 24))
    height = draw(st.integers(1, 24))
    is_float = draw(st.booleans())
    if is_float:
        arr = draw(
            st.lists(
                st.floats(-1e6, 1e6, width=32, allow_nan=False),
                min_size=width * height,
                max_size=width * height,
            )
        )
        samples = np.array(arr, dtype=np.float32).reshape(height, width)
        nodata = draw(st.sampled_from([None, -9999.0, float("nan")]))
    else:
        arr = draw(
            st.lists(st.integers(0, 65535), min_size=width * height, max_size=width * height)
        )
        samples = np.array(arr, dtype=np.uint16).reshape(height, width)
        nodata = draw(st.sampled_from([None, 0.0, 65535.0]))
    georef = GridGeoreference(
        draw(st.floats(-1e7, 1e7, allow_nan=False)),
        draw(st.floats(-1e7, 1e7, allow_nan=False)),
        draw(st.floats(0.1, 1000, allow_nan=False)),
        draw(st.floats(0.1, 1000, allow_nan=False)),
        draw(st.integers(1, 32767)),
    )
    return Raster(width=width, height=height, samples=samples, georef=georef, nodata=nodata)


@given(rasters())
@settings(max_examples=60, deadline=None)
def test_round_trip_property(raster):
    assert read_geotiff(write_geotiff(raster)) == raster


def test_endianness_equivalence():
    raster = make_float_raster([[0.25, -1.5, 3.0], [7.0, 0.0, 2.5]])
    little = read_geotiff(write_geotiff(raster))
    big = read_geotiff(_big_endian_variant(raster))
    assert little == big == raster


def test_deflate_strip_decodes_like_uncompressed():
    raster = make_float_raster([[float(i) for i in range(6)] for _ in range(4)])
    plain = write_geotiff(raster)
    # recompress the single strip in place: point offsets at appended data
    ifd_off = struct.unpack("<I", plain[4:8])[0]
    n = struct.unpack("<H", plain[ifd_off : ifd_off + 2])[0]
    tags = {}
    for i in range(n):
        pos = ifd_off + 2 + 12 * i
        tag = struct.unpack("<H", plain[pos : pos + 2])[0]
        tags[tag] = pos
    strip_off = struct.unpack("<I", plain[tags[273] + 8 : tags[273] + 12])[0]
    strip_len = struct.unpack("<I", plain[tags[279] + 8 : tags[279] + 12])[0]
    compressed = zlib.compress(plain[strip_off : strip_off + strip_len])
    out = bytearray(plain)
    out[tags[259] + 8 : tags[259] + 12] = struct.pack("<I", 8)
    out[tags[273] + 8 : tags[273] + 12] = struct.pack("<I", len(plain))
    out[tags[279] + 8 : tags[279] + 12] = struct.pack("<I", len(compressed))
    out += compressed
    assert read_geotiff(bytes(out)) == raster


def test_tiled_layout_reads(tmp_path):
    # Pillow writes stripped files; build a tiled variant by hand
    raster = make_float_raster([[float(r * 10 + c) for c in range(5)] for r in range(5)])
    g = raster.georef
    tw = th = 4
    tiles = []
    padded = np.zeros((8, 8), dtype=np.float32)
    padded[:5, :5] = raster.samples
    for ty in range(2):
        for tx in range(2):
            tiles.append(padded[ty * th : (ty + 1) * th, tx * tw : (tx + 1) * tw].tobytes())
    geokeys = (1, 1, 0, 1, 3072, 0, 1, g.epsg_code)
    scale = struct.pack("<3d", 10.0, 10.0, 0.0)
    tie = struct.pack("<6d", 0, 0, 0, g.origin_x, g.origin_y, 0.0)
    keys = struct.pack(f"<{len(geokeys)}H", *geokeys)
    entries = [
        (256, 4, 1, struct.pack("<I", 5)),
        (257, 4, 1, struct.pack("<I", 5)),
        (258, 3, 1, struct.pack("<H", 32)),
        (259, 3, 1, struct.pack("<H", 1)),
        (322, 4, 1, struct.pack("<I", tw)),
        (323, 4, 1, struct.pack("<I", th)),
        (324, 4, 4, "tile_offsets"),
        (325, 4, 4, struct.pack("<4I", *(len(t) for t in tiles))),
        (339, 3, 1, struct.pack("<H", 3)),
        (33550, 12, 3, scale),
        (33922, 12, 6, tie),
        (34735, 3, len(geokeys), keys),
    ]
    ifd_size = 2 + 12 * len(entries) + 4
    over_off = 8 + ifd_size
    overflow = b""
    packed = []
    for tag, ftype, count, payload in entries:
        if payload == "tile_offsets":
            packed.append((tag, ftype, count, "tile_offsets"))
        elif len(payload) <= 4:
            packed.append((tag, ftype, count, payload.ljust(4, b"\x00")))
        else:
            packed.append((tag, ftype, count, struct.pack("<I", over_off + len(overflow))))
            overflow += payload
    # reserve room for the tile-offset array in the overflow area
    tile_off_pos = over_off + len(overflow)
    overflow += b"\x00" * 16
    data_off = over_off + len(overflow)
    offsets = []
    pos = data_off
    for t in tiles:
        offsets.append(pos)
        pos += len(t)
    overflow = overflow[:-16] + struct.pack("<4I", *offsets)
    out = b"II" + struct.pack("<HI", 42, 8) + struct.pack("<H", len(packed))
    for tag, ftype, count, value in packed:
        if value == "tile_offsets":
            value = struct.pack("<I", tile_off_pos)
        out += struct.pack("<HHI", tag, ftype, count) + value
    out += struct.pack("<I", 0) + overflow + b"".join(tiles)
    decoded = read_geotiff(out)
    assert decoded.samples.tolist() == raster.samples.tolist()

"""Minimal deterministic RGBA PNG encoder.

Fixed parameterization (filter type 0 on every row, no interlace, one
zlib level) so identical pixel data always yields identical bytes,
which golden-tile tests rely on.
"""

from __future__ import annotations

import struct
import zlib

import numpy as np

_ZLIB_LEVEL = 6


def _chunk(kind: bytes, payload: bytes) -> bytes:
    crc = zlib.crc32(kind + payload) & 0xFFFFFFFF
    return struct.pack(">I", len(payload)) + kind + payload + struct.pack(">I", crc)


def encode_rgba_png(pixels: np.ndarray) -> bytes:
    """Encode a (height, width, 4) uint8 array as an 8-bit RGBA PNG."""
    if pixels.ndim != 3 or pixels.shape[2] != 4 or pixels.dtype != np.uint8:
        raise ValueError("expected (height, width, 4) uint8 array")
    height, width = pixels.shape[:2]
    ihdr = struct.pack(">IIBBBBB", width, height, 8, 6, 0, 0, 0)
    raw = bytearray()
    for row in range(height):
        raw.append(0)  # filter type 0 (None)
        raw += pixels[row].tobytes()
    idat = zlib.compress(bytes(raw), _ZLIB_LEVEL)
    return (
        b"\x89PNG\r\n\x1a\n"
        + _chunk(b"IHDR", ihdr)
        + _chunk(b"IDAT", idat)
        + _chunk(b"IEND", b"")
    )

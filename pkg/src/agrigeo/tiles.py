"""Native-CRS tile pyramid over a raster's own bounding box.

Level z splits the bbox into 2^z x 2^z equal cells; each cell renders as
a 256x256 RGBA tile by nearest-neighbor sampling at tile-pixel centers.
No map projection is involved: the pyramid lives in the layer's CRS.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .indices import ColorRamp, ramp_array
from .png import encode_rgba_png
from .raster import Raster

TILE_SIZE = 256


@dataclass(frozen=True)
class TileAddress:
    z: int
    x: int
    y: int

    def in_bounds(self) -> bool:
        return self.z >= 0 and 0 <= self.x < 2**self.z and 0 <= self.y < 2**self.z


def render_tile(raster: Raster, address: TileAddress, ramp: ColorRamp) -> bytes:
    """Render one pyramid tile of a float raster as deterministic PNG."""
    if not address.in_bounds():
        raise IndexError(f"tile {address} outside 2^{address.z} grid")
    min_x, min_y, max_x, max_y = raster.bbox()
    n = 2**address.z
    cell_w = (max_x - min_x) / n
    cell_h = (max_y - min_y) / n
    tx0 = min_x + address.x * cell_w
    ty1 = max_y - address.y * cell_h  # tile's top edge

    j = np.arange(TILE_SIZE)
    px = tx0 + (j + 0.5) * (cell_w / TILE_SIZE)
    py = ty1 - (j + 0.5) * (cell_h / TILE_SIZE)
    g = raster.georef
    cols = np.floor((px - g.origin_x) / g.pixel_size_x).astype(np.intp)
    rows = np.floor((g.origin_y - py) / g.pixel_size_y).astype(np.intp)
    col_ok = (cols >= 0) & (cols < raster.width)
    row_ok = (rows >= 0) & (rows < raster.height)
    cols_c = np.clip(cols, 0, raster.width - 1)
    rows_c = np.clip(rows, 0, raster.height - 1)

    values = raster.samples.astype(np.float64)[np.ix_(rows_c, cols_c)]
    valid = (raster.valid_mask() & np.isfinite(raster.samples.astype(np.float64)))[
        np.ix_(rows_c, cols_c)
    ]
    valid &= row_ok[:, None] & col_ok[None, :]
    rgba = ramp_array(values, valid, ramp)
    return encode_rgba_png(rgba)


def suggested_max_zoom(raster: Raster) -> int:
    """Smallest z at which one tile pixel covers at most one raster pixel."""
    z = 0
    while 2**z * TILE_SIZE < max(raster.width, raster.height) and z < 24:
        z += 1
    return z

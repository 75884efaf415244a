"""Core raster model: a single-band georeferenced grid of samples.

Samples are held in a numpy array (uint16 or float32), row-major, shape
(height, width). NoData is an optional sentinel compared exactly
(NaN nodata matches NaN samples).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SAMPLE_DTYPES = (np.uint16, np.float32)


@dataclass(frozen=True)
class GridGeoreference:
    """North-up affine placement of a pixel grid in a projected CRS.

    The center of pixel (col, row) maps to
    (origin_x + (col+0.5)*pixel_size_x, origin_y - (row+0.5)*pixel_size_y).
    """

    origin_x: float
    origin_y: float
    pixel_size_x: float
    pixel_size_y: float
    epsg_code: int

    def __post_init__(self):
        if self.pixel_size_x <= 0 or self.pixel_size_y <= 0:
            raise ValueError("pixel sizes must be positive")
        if self.epsg_code < 0:
            raise ValueError("epsg_code must be non-negative")

    def pixel_center(self, col: int, row: int) -> tuple[float, float]:
        return (
            self.origin_x + (col + 0.5) * self.pixel_size_x,
            self.origin_y - (row + 0.5) * self.pixel_size_y,
        )

    def approx_equal(self, other: "GridGeoreference", tol: float = 1e-6) -> bool:
        """Coordinate agreement within tol absolute; EPSG compared exactly."""
        return (
            abs(self.origin_x - other.origin_x) <= tol
            and abs(self.origin_y - other.origin_y) <= tol
            and abs(self.pixel_size_x - other.pixel_size_x) <= tol
            and abs(self.pixel_size_y - other.pixel_size_y) <= tol
            and self.epsg_code == other.epsg_code
        )


@dataclass(frozen=True, eq=False)
class Raster:
    width: int
    height: int
    samples: np.ndarray  # shape (height, width), uint16 or float32
    georef: GridGeoreference
    nodata: float | None = None

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("raster dimensions must be positive")
        arr = np.asarray(self.samples)
        if arr.dtype not in (np.dtype(np.uint16), np.dtype(np.float32)):
            raise ValueError(f"unsupported sample dtype {arr.dtype}")
        if arr.shape != (self.height, self.width):
            if arr.size == self.width * self.height:
                arr = arr.reshape(self.height, self.width)
            else:
                raise ValueError(
                    f"samples size {arr.size} != width*height {self.width * self.height}"
                )
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)

    @property
    def is_float(self) -> bool:
        return self.samples.dtype == np.float32

    def valid_mask(self) -> np.ndarray:
        """Boolean mask of samples that are not the NoData sentinel."""
        if self.nodata is None:
            return np.ones(self.samples.shape, dtype=bool)
        if self.is_float and math.isnan(self.nodata):
            return ~np.isnan(self.samples)
        return self.samples != np.array(self.nodata).astype(self.samples.dtype)

    def bbox(self) -> tuple[float, float, float, float]:
        """Grid extent as (min_x, min_y, max_x, max_y) in map units."""
        g = self.georef
        return (
            g.origin_x,
            g.origin_y - self.height * g.pixel_size_y,
            g.origin_x + self.width * g.pixel_size_x,
            g.origin_y,
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, Raster):
            return NotImplemented
        if (self.width, self.height) != (other.width, other.height):
            return False
        if self.samples.dtype != other.samples.dtype:
            return False
        # bit-exact sample comparison (NaNs compare equal by bit pattern)
        if self.samples.tobytes() != other.samples.tobytes():
            return False
        if self.georef != other.georef:
            return False
        return _nodata_equal(self.nodata, other.nodata)

    def __hash__(self):
        return hash((self.width, self.height, self.samples.tobytes()))


def _nodata_equal(a: float | None, b: float | None) -> bool:
    if a is None or b is None:
        return a is None and b is None
    if math.isnan(a) or math.isnan(b):
        return math.isnan(a) and math.isnan(b)
    return a == b

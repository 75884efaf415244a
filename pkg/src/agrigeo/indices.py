"""Band arithmetic and color-ramp rendering.

NDVI is normalized_difference(nir_band, red_band); the operation is
scale-invariant, so raw digital numbers and reflectances give the same
index values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GeoreferenceMismatchError, ShapeMismatchError
from .raster import Raster


def normalized_difference(a: Raster, b: Raster) -> Raster:
    """(a - b) / (a + b) per pixel, float32 output, NaN as NoData.

    A pixel is NaN where either input is its NoData sentinel or where
    a + b == 0.
    """
    if (a.width, a.height) != (b.width, b.height):
        raise ShapeMismatchError(
            f"rasters are {a.width}x{a.height} vs {b.width}x{b.height}"
        )
    if not a.georef.approx_equal(b.georef):
        raise GeoreferenceMismatchError(
            f"georeferences differ: {a.georef} vs {b.georef}"
        )
    av = a.samples.astype(np.float64)
    bv = b.samples.astype(np.float64)
    denom = av + bv
    with np.errstate(divide="ignore", invalid="ignore"):
        out = (av - bv) / denom
    out[denom == 0] = np.nan
    out[~a.valid_mask()] = np.nan
    out[~b.valid_mask()] = np.nan
    return Raster(
        width=a.width,
        height=a.height,
        samples=out.astype(np.float32),
        georef=a.georef,
        nodata=float("nan"),
    )


@dataclass(frozen=True)
class ColorRamp:
    """Piecewise-linear value -> RGBA mapping with clamped ends."""

    stops: tuple[tuple[float, int, int, int, int], ...]
    nodata_color: tuple[int, int, int, int] = (0, 0, 0, 0)

    def __post_init__(self):
        if len(self.stops) < 2:
            raise ValueError("a color ramp needs at least 2 stops")
        values = [s[0] for s in self.stops]
        if any(v2 <= v1 for v1, v2 in zip(values, values[1:])):
            raise ValueError("ramp stop values must be strictly increasing")
        for stop in self.stops:
            if any(c < 0 or c > 255 for c in stop[1:]):
                raise ValueError("ramp channels must be in [0, 255]")


# red -> yellow -> green vegetation ramp, NoData transparent
NDVI_RAMP = ColorRamp(
    stops=(
        (-1.0, 165, 0, 38, 255),
        (0.0, 254, 224, 139, 255),
        (1.0, 0, 104, 55, 255),
    )
)

GRAY_RAMP = ColorRamp(stops=((-1.0, 0, 0, 0, 255), (1.0, 255, 255, 255, 255)))

NAMED_RAMPS = {"ndvi": NDVI_RAMP, "gray": GRAY_RAMP}


def apply_color_ramp(values: Raster, ramp: ColorRamp) -> np.ndarray:
    """Render a float raster to (height, width, 4) uint8 RGBA."""
    v = values.samples.astype(np.float64)
    valid = values.valid_mask() & np.isfinite(v)
    return ramp_array(v, valid, ramp)


def ramp_array(v: np.ndarray, valid: np.ndarray, ramp: ColorRamp) -> np.ndarray:
    """Apply a ramp to a float array with an explicit validity mask."""
    out = np.empty(v.shape + (4,), dtype=np.uint8)
    stop_vals = np.array([s[0] for s in ramp.stops])
    stop_rgba = np.array([s[1:] for s in ramp.stops], dtype=np.float64)
    vv = np.where(valid, v, stop_vals[0])
    vc = np.clip(vv, stop_vals[0], stop_vals[-1])
    idx = np.clip(np.searchsorted(stop_vals, vc, side="right") - 1, 0, len(stop_vals) - 2)
    lo, hi = stop_vals[idx], stop_vals[idx + 1]
    t = (vc - lo) / (hi - lo)
    rgba = stop_rgba[idx] + t[..., None] * (stop_rgba[idx + 1] - stop_rgba[idx])
    out[:] = np.floor(rgba + 0.5).astype(np.uint8)  # round half-up
    out[~valid] = np.array(ramp.nodata_color, dtype=np.uint8)
    return out

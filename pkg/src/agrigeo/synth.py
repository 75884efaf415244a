"""Deterministic synthetic scenes: band rasters plus field polygons.

Real registry polygons and satellite scenes cannot be bundled, so tests
and demos run on generated data: non-overlapping quadrilateral fields on
a jittered grid, with NIR/red bands synthesized from a smooth per-field
greenness target. Fixed seed => byte-identical outputs.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .geotiff import write_geotiff
from .raster import GridGeoreference, Raster

CROP_CODES = ("winter wheat", "spring barley", "rapeseed", "sugar beet")

DEFAULT_EPSG = 25832
DEFAULT_ORIGIN = (600000.0, 6100000.0)
PIXEL_SIZE = 10.0
BAND_TOTAL = 8000.0  # b8 + b4 digital-number budget per pixel


def _smooth_noise(rng, height, width, cells=8, amplitude=1.0):
    """Blocky low-frequency noise upsampled to the grid, deterministic."""
    coarse = rng.uniform(-amplitude, amplitude, size=(cells, cells))
    ys = np.linspace(0, cells - 1, height)
    xs = np.linspace(0, cells - 1, width)
    y0 = np.clip(ys.astype(int), 0, cells - 2)
    x0 = np.clip(xs.astype(int), 0, cells - 2)
    ty = (ys - y0)[:, None]
    tx = (xs - x0)[None, :]
    a = coarse[np.ix_(y0, x0)]
    b = coarse[np.ix_(y0, x0 + 1)]
    c = coarse[np.ix_(y0 + 1, x0)]
    d = coarse[np.ix_(y0 + 1, x0 + 1)]
    return a * (1 - ty) * (1 - tx) + b * (1 - ty) * tx + c * ty * (1 - tx) + d * ty * tx


def generate_scene(
    n_fields: int, width: int, height: int, seed: int
) -> tuple[Raster, Raster, dict]:
    """Return (band4, band8, fields GeoJSON document)."""
    rng = np.random.default_rng(seed)
    ox, oy = DEFAULT_ORIGIN
    georef = GridGeoreference(ox, oy, PIXEL_SIZE, PIXEL_SIZE, DEFAULT_EPSG)

    grid = 1
    while grid * grid < n_fields:
        grid += 1
    cell_w = width * PIXEL_SIZE / grid
    cell_h = height * PIXEL_SIZE / grid

    features = []
    field_regions = []  # (polygon rings in map coords, greenness base)
    for i in range(n_fields):
        gy, gx = divmod(i, grid)
        x0 = ox + gx * cell_w
        y0 = oy - gy * cell_h  # cell top
        margin_x = 0.12 * cell_w
        margin_y = 0.12 * cell_h
        jit = lambda s: rng.uniform(0.0, s)  # noqa: E731
        # quadrilateral with each corner pulled inward by a random amount
        ring = [
            (x0 + margin_x + jit(0.15 * cell_w), y0 - margin_y - jit(0.15 * cell_h)),
            (x0 + cell_w - margin_x - jit(0.15 * cell_w), y0 - margin_y - jit(0.15 * cell_h)),
            (x0 + cell_w - margin_x - jit(0.15 * cell_w), y0 - cell_h + margin_y + jit(0.15 * cell_h)),
            (x0 + margin_x + jit(0.15 * cell_w), y0 - cell_h + margin_y + jit(0.15 * cell_h)),
        ]
        ring.append(ring[0])
        crop = CROP_CODES[int(rng.integers(0, len(CROP_CODES)))]
        greenness = float(rng.uniform(0.2, 0.8))
        features.append(
            {
                "type": "Feature",
                "id": i,
                "properties": {"crop": crop, "greenness": round(greenness, 6)},
                "geometry": {"type": "Polygon", "coordinates": [[list(v) for v in ring]]},
            }
        )
        field_regions.append((ring, greenness, gx, gy))

    # per-pixel greenness target: bare-soil background, per-field plateaus
    target = np.full((height, width), 0.08) + 0.05 * _smooth_noise(rng, height, width)
    cols_per_cell = width / grid
    rows_per_cell = height / grid
    for ring, greenness, gx, gy in field_regions:
        c0 = int(gx * cols_per_cell)
        c1 = min(width, int((gx + 1) * cols_per_cell) + 1)
        r0 = int(gy * rows_per_cell)
        r1 = min(height, int((gy + 1) * rows_per_cell) + 1)
        target[r0:r1, c0:c1] = greenness
    target += 0.03 * rng.standard_normal((height, width))
    target = np.clip(target, -0.9, 0.9)

    b8 = np.round(BAND_TOTAL * (1.0 + target) / 2.0).astype(np.uint16)
    b4 = np.round(BAND_TOTAL * (1.0 - target) / 2.0).astype(np.uint16)
    band8 = Raster(width=width, height=height, samples=b8, georef=georef)
    band4 = Raster(width=width, height=height, samples=b4, georef=georef)
    doc = {"type": "FeatureCollection", "epsg": DEFAULT_EPSG, "features": features}
    return band4, band8, doc


def write_scene(n_fields: int, width: int, height: int, seed: int, out_dir: str | Path) -> dict:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    band4, band8, doc = generate_scene(n_fields, width, height, seed)
    paths = {
        "band4": out / "band04.tif",
        "band8": out / "band08.tif",
        "fields": out / "fields.geojson",
    }
    paths["band4"].write_bytes(write_geotiff(band4))
    paths["band8"].write_bytes(write_geotiff(band8))
    paths["fields"].write_text(json.dumps(doc, sort_keys=True))
    return {k: str(v) for k, v in paths.items()}

"""Polygon-on-raster join: pixel masks, per-field statistics, regional
histograms, and mean-value classification.

Pixel inclusion is center-in-polygon under the even-odd rule, evaluated
by ray casting with strict inequalities, so masks of adjacent fields
partition the grid (shared-edge pixels land on exactly one side).
"""

from __future__ import annotations

import csv
import io
import json
import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass

import numpy as np

from .errors import BadBinsError, BadBreaksError, BadRangeError, CrsMismatchError
from .raster import GridGeoreference, Raster
from .vector import FeatureCollection, PolygonGeometry


@dataclass(frozen=True)
class PixelMask:
    width: int
    height: int
    cells: frozenset  # of (col, row)

    def to_bool_array(self) -> np.ndarray:
        arr = np.zeros((self.height, self.width), dtype=bool)
        for col, row in self.cells:
            arr[row, col] = True
        return arr


def pixel_mask(
    geometry: PolygonGeometry, georef: GridGeoreference, width: int, height: int
) -> PixelMask:
    """Pixels whose center is inside the geometry (even-odd ray cast).

    Vectorized over the geometry's bounding box; the per-edge test is the
    same float expression a per-point loop would evaluate, so results are
    bit-identical to the naive rule.
    """
    min_x, min_y, max_x, max_y = geometry.bbox()
    col0 = max(0, int(math.floor((min_x - georef.origin_x) / georef.pixel_size_x)))
    col1 = min(width - 1, int(math.ceil((max_x - georef.origin_x) / georef.pixel_size_x)))
    row0 = max(0, int(math.floor((georef.origin_y - max_y) / georef.pixel_size_y)))
    row1 = min(height - 1, int(math.ceil((georef.origin_y - min_y) / georef.pixel_size_y)))
    if col1 < col0 or row1 < row0:
        return PixelMask(width, height, frozenset())

    cols = np.arange(col0, col1 + 1)
    rows = np.arange(row0, row1 + 1)
    px = georef.origin_x + (cols + 0.5) * georef.pixel_size_x
    py = georef.origin_y - (rows + 0.5) * georef.pixel_size_y
    pxg, pyg = np.meshgrid(px, py)
    inside = np.zeros(pxg.shape, dtype=bool)
    for ring in geometry.rings:
        for (x1, y1), (x2, y2) in zip(ring[:-1], ring[1:]):
            if y1 == y2:
                continue  # crossing condition below is always false
            crosses = (y1 > pyg) != (y2 > pyg)
            with np.errstate(invalid="ignore"):
                xcross = x1 + (pyg - y1) * (x2 - x1) / (y2 - y1)
            inside ^= crosses & (pxg < xcross)
    rr, cc = np.nonzero(inside)
    cells = frozenset(zip((cc + col0).tolist(), (rr + row0).tolist()))
    return PixelMask(width, height, cells)


@dataclass(frozen=True)
class ZonalRecord:
    field_id: int
    pixel_count: int
    valid_count: int
    mean: float | None
    std: float | None
    min: float | None
    max: float | None
    valid_fraction: float

    def as_dict(self) -> dict:
        return {
            "field_id": self.field_id,
            "pixel_count": self.pixel_count,
            "valid_count": self.valid_count,
            "mean": self.mean,
            "std": self.std,
            "min": self.min,
            "max": self.max,
            "valid_fraction": self.valid_fraction,
        }


def zonal_statistics(raster: Raster, features: FeatureCollection) -> list[ZonalRecord]:
    """One record per feature in input order; population statistics over
    valid (non-NoData, finite) masked pixels, two-pass for accuracy."""
    if (
        raster.georef.epsg_code == 0
        or features.epsg_code == 0
        or raster.georef.epsg_code != features.epsg_code
    ):
        raise CrsMismatchError(
            f"raster EPSG {raster.georef.epsg_code} vs vector EPSG {features.epsg_code}"
        )
    valid = raster.valid_mask() & np.isfinite(raster.samples.astype(np.float64))
    values = raster.samples.astype(np.float64)
    records = []
    for feature in features:
        mask = pixel_mask(feature.geometry, raster.georef, raster.width, raster.height)
        records.append(_stats_for_mask(feature.id, mask, values, valid))
    return records


def _stats_for_mask(field_id, mask: PixelMask, values, valid) -> ZonalRecord:
    pixel_count = len(mask.cells)
    if pixel_count == 0:
        return ZonalRecord(field_id, 0, 0, None, None, None, None, 0.0)
    ordered = sorted(mask.cells, key=lambda rc: (rc[1], rc[0]))  # row-major, deterministic
    rows = np.fromiter((r for _, r in ordered), dtype=np.intp, count=pixel_count)
    cols = np.fromiter((c for c, _ in ordered), dtype=np.intp, count=pixel_count)
    good = valid[rows, cols]
    vals = values[rows[good], cols[good]]
    valid_count = int(vals.size)
    if valid_count == 0:
        return ZonalRecord(field_id, pixel_count, 0, None, None, None, None, 0.0)
    mean = float(np.sum(vals) / valid_count)
    std = float(math.sqrt(np.sum((vals - mean) ** 2) / valid_count))
    return ZonalRecord(
        field_id=field_id,
        pixel_count=pixel_count,
        valid_count=valid_count,
        mean=mean,
        std=std,
        min=float(np.min(vals)),
        max=float(np.max(vals)),
        valid_fraction=valid_count / pixel_count,
    )


# --- histogram ---

@dataclass(frozen=True)
class Histogram:
    lo: float
    hi: float
    counts: tuple[int, ...]
    underflow: int
    overflow: int

    @property
    def n_bins(self) -> int:
        return len(self.counts)

    def as_dict(self) -> dict:
        return {
            "lo": self.lo,
            "hi": self.hi,
            "n_bins": self.n_bins,
            "counts": list(self.counts),
            "underflow": self.underflow,
            "overflow": self.overflow,
        }


def histogram(values, lo: float, hi: float, n_bins: int) -> Histogram:
    """Left-closed right-open bins over [lo, hi); the last bin also takes
    hi exactly. NaNs are skipped, out-of-range values go to under/overflow."""
    if lo >= hi:
        raise BadRangeError(f"lo {lo} must be below hi {hi}")
    if n_bins < 1:
        raise BadBinsError(f"n_bins {n_bins} must be >= 1")
    w = (hi - lo) / n_bins
    edges = [lo + i * w for i in range(n_bins + 1)]
    counts = [0] * n_bins
    underflow = overflow = 0
    for v in values:
        if v is None or (isinstance(v, float) and math.isnan(v)):
            continue
        if v < lo:
            underflow += 1
        elif v > hi:
            overflow += 1
        elif v == hi:
            counts[n_bins - 1] += 1
        else:
            idx = min(bisect_right(edges, v) - 1, n_bins - 1)
            counts[idx] += 1
    return Histogram(lo, hi, tuple(counts), underflow, overflow)


# --- classification ---

def classify_fixed(records, breaks) -> list[tuple[int, int | None]]:
    """Left-closed fixed-break classes: class 0 below the first break,
    class i for mean in [break_i, break_{i+1}), class m at/above the last."""
    breaks = [float(b) for b in breaks]
    if any(b2 <= b1 for b1, b2 in zip(breaks, breaks[1:])):
        raise BadBreaksError(f"breaks not strictly ascending: {breaks}")
    out = []
    for rec in records:
        if rec.mean is None:
            out.append((rec.field_id, None))
        else:
            out.append((rec.field_id, bisect_right(breaks, rec.mean)))
    return out


def classify_quantiles(records, k: int) -> list[tuple[int, int | None]]:
    """k quantile classes from nearest-rank break values; a mean equal to
    a break stays in the lower class (class = breaks strictly below it)."""
    if k < 1:
        raise BadBreaksError(f"quantile class count {k} must be >= 1")
    means = sorted(rec.mean for rec in records if rec.mean is not None)
    n = len(means)
    if n == 0 or k == 1:
        return [(rec.field_id, None if rec.mean is None else 0) for rec in records]
    # nearest-rank (j/k)-quantiles, j = 1..k-1, ranks 1-based
    breaks = [means[max(1, math.ceil(j * n / k)) - 1] for j in range(1, k)]
    out = []
    for rec in records:
        if rec.mean is None:
            out.append((rec.field_id, None))
        else:
            out.append((rec.field_id, bisect_left(breaks, rec.mean)))
    return out


def classify(records, scheme: dict) -> list[tuple[int, int | None]]:
    """scheme: {"breaks": [...]} or {"quantiles": k}."""
    if "breaks" in scheme:
        return classify_fixed(records, scheme["breaks"])
    if "quantiles" in scheme:
        return classify_quantiles(records, int(scheme["quantiles"]))
    raise ValueError("scheme must contain 'breaks' or 'quantiles'")


# --- serialization ---

CSV_HEADER = ["field_id", "pixel_count", "valid_count", "mean", "std", "min", "max", "valid_fraction"]


def records_to_csv(records) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for rec in records:
        writer.writerow(
            [
                rec.field_id,
                rec.pixel_count,
                rec.valid_count,
                "" if rec.mean is None else repr(rec.mean),
                "" if rec.std is None else repr(rec.std),
                "" if rec.min is None else repr(rec.min),
                "" if rec.max is None else repr(rec.max),
                repr(rec.valid_fraction),
            ]
        )
    return buf.getvalue()


def records_from_csv(text: str) -> list[ZonalRecord]:
    reader = csv.DictReader(io.StringIO(text))
    records = []
    for row in reader:
        records.append(
            ZonalRecord(
                field_id=int(row["field_id"]),
                pixel_count=int(row["pixel_count"]),
                valid_count=int(row["valid_count"]),
                mean=float(row["mean"]) if row["mean"] else None,
                std=float(row["std"]) if row["std"] else None,
                min=float(row["min"]) if row["min"] else None,
                max=float(row["max"]) if row["max"] else None,
                valid_fraction=float(row["valid_fraction"]),
            )
        )
    return records


def records_to_json(records) -> str:
    return json.dumps([rec.as_dict() for rec in records])

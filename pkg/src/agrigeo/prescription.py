"""Variable-rate application maps from an NDVI raster and a field polygon.

Zones follow the same left-closed break rule as field classification;
each in-field valid pixel carries its zone's rate (units/ha), everything
else is NoData so "no decision" never reads as "apply zero".
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadBreaksError, CrsMismatchError, EmptyFieldError, RateLengthMismatchError
from .raster import Raster
from .vector import FieldFeature
from .zonal import pixel_mask


@dataclass(frozen=True)
class PrescriptionMap:
    field_id: int
    zone_raster: Raster  # float32 rates in units/ha, NaN outside the field
    breaks: tuple[float, ...]
    rates: tuple[float, ...]
    pixel_area_ha: float
    total_amount: float


def build_prescription(
    ndvi: Raster, field: FieldFeature, breaks, rates
) -> PrescriptionMap:
    """Per-pixel zone rates for one field; totals in product units."""
    breaks = tuple(float(b) for b in breaks)
    rates = tuple(float(r) for r in rates)
    if any(b2 <= b1 for b1, b2 in zip(breaks, breaks[1:])):
        raise BadBreaksError(f"breaks not strictly ascending: {list(breaks)}")
    if len(rates) != len(breaks) + 1:
        raise RateLengthMismatchError(
            f"{len(rates)} rates for {len(breaks)} breaks, need {len(breaks) + 1}"
        )
    if (
        ndvi.georef.epsg_code == 0
        or field.epsg_code == 0
        or ndvi.georef.epsg_code != field.epsg_code
    ):
        raise CrsMismatchError(
            f"raster EPSG {ndvi.georef.epsg_code} vs field EPSG {field.epsg_code}"
        )

    mask = pixel_mask(field.geometry, ndvi.georef, ndvi.width, ndvi.height)
    in_field = mask.to_bool_array()
    values = ndvi.samples.astype(np.float64)
    usable = in_field & ndvi.valid_mask() & np.isfinite(values)

    zone = np.searchsorted(np.array(breaks), values, side="right") if breaks else np.zeros(
        values.shape, dtype=np.intp
    )
    rate_grid = np.array(rates)[zone]
    out = np.full(values.shape, np.nan)
    out[usable] = rate_grid[usable]

    g = ndvi.georef
    pixel_area_ha = g.pixel_size_x * g.pixel_size_y / 10000.0
    total = float(np.sum(rate_grid[usable]) * pixel_area_ha)
    zone_raster = Raster(
        width=ndvi.width,
        height=ndvi.height,
        samples=out.astype(np.float32),
        georef=g,
        nodata=float("nan"),
    )
    return PrescriptionMap(
        field_id=field.id,
        zone_raster=zone_raster,
        breaks=breaks,
        rates=rates,
        pixel_area_ha=pixel_area_ha,
        total_amount=total,
    )


def application_summary(
    presc: PrescriptionMap, uniform_rate: float, unit_cost: float = 1.0
) -> dict:
    """Economics of variable-rate vs a flat uniform rate over the field."""
    if uniform_rate <= 0:
        raise ValueError(f"uniform_rate must be positive, got {uniform_rate}")
    valid = presc.zone_raster.valid_mask() & np.isfinite(presc.zone_raster.samples)
    n_valid = int(np.count_nonzero(valid))
    if n_valid == 0:
        raise EmptyFieldError(f"field {presc.field_id} has no valid pixels")
    area_ha = n_valid * presc.pixel_area_ha
    variable_total = presc.total_amount
    uniform_total = uniform_rate * area_ha
    cost_saving = (uniform_total - variable_total) * unit_cost
    return {
        "area_ha": area_ha,
        "variable_total": variable_total,
        "uniform_total": uniform_total,
        "reduction_fraction": 1.0 - variable_total / uniform_total,
        "cost_saving": cost_saving,
        "saving_per_ha": cost_saving / area_ha,
    }

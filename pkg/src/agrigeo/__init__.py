"""agrigeo: precision-agriculture geospatial toolkit.

Band raster codecs, field polygon parsing, vegetation indices, zonal
statistics, variable-rate prescription maps, and an HTTP layer catalog.
"""

from .raster import GridGeoreference, Raster
from .geotiff import read_geotiff, write_geotiff
from .vector import (
    FeatureCollection,
    FieldFeature,
    PolygonGeometry,
    filter_by_crop,
    read_geojson,
    read_shapefile,
)
from .indices import ColorRamp, NDVI_RAMP, apply_color_ramp, normalized_difference
from .zonal import (
    Histogram,
    PixelMask,
    ZonalRecord,
    classify,
    histogram,
    pixel_mask,
    zonal_statistics,
)
from .prescription import PrescriptionMap, application_summary, build_prescription

__version__ = "0.1.0"

__all__ = [
    "GridGeoreference",
    "Raster",
    "read_geotiff",
    "write_geotiff",
    "FeatureCollection",
    "FieldFeature",
    "PolygonGeometry",
    "filter_by_crop",
    "read_geojson",
    "read_shapefile",
    "ColorRamp",
    "NDVI_RAMP",
    "apply_color_ramp",
    "normalized_difference",
    "Histogram",
    "PixelMask",
    "ZonalRecord",
    "classify",
    "histogram",
    "pixel_mask",
    "zonal_statistics",
    "PrescriptionMap",
    "application_summary",
    "build_prescription",
]

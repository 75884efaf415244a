"""Typed errors raised across the toolkit.

Every parser/analysis failure maps to one of these, so callers (CLI,
HTTP service) can translate them to exit codes / status codes by class.
"""


class AgrigeoError(Exception):
    """Base class for all toolkit errors."""


# --- raster codec ---

class TruncatedError(AgrigeoError):
    """Input ended before a required structure could be read."""


class BadMagicError(AgrigeoError):
    """Input is not a classic TIFF (or shapefile header is wrong)."""


class UnsupportedLayoutError(AgrigeoError):
    """TIFF is structurally valid but outside the supported subset."""


class UnsupportedCompressionError(AgrigeoError):
    """TIFF compression code other than 1 (none) or 8 (deflate)."""


class MissingGeoreferenceError(AgrigeoError):
    """Required georeferencing tags (33550/33922/34735) are absent."""


# --- vector codec ---

class ParseError(AgrigeoError):
    """Malformed GeoJSON text."""


class UnsupportedGeometryError(AgrigeoError):
    """GeoJSON geometry type other than Polygon/MultiPolygon."""


class BadHeaderError(AgrigeoError):
    """Shapefile/DBF header has wrong file code or version."""


class UnsupportedShapeTypeError(AgrigeoError):
    """Shapefile shape type other than polygon (5) or null (0)."""


class RecordCountMismatchError(AgrigeoError):
    """Shapefile .shp and .dbf record counts disagree."""


# --- analysis ---

class ShapeMismatchError(AgrigeoError):
    """Two rasters differ in width/height."""


class GeoreferenceMismatchError(AgrigeoError):
    """Two rasters differ in origin, pixel size, or EPSG code."""


class CrsMismatchError(AgrigeoError):
    """Raster and vector EPSG codes differ, or one is unknown (0)."""


class BadRangeError(AgrigeoError):
    """Histogram range with lo >= hi."""


class BadBinsError(AgrigeoError):
    """Histogram bin count below 1."""


class BadBreaksError(AgrigeoError):
    """Classification breaks not strictly ascending."""


class RateLengthMismatchError(AgrigeoError):
    """Prescription rates length is not breaks length + 1."""


class EmptyFieldError(AgrigeoError):
    """Prescription summary requested for a field with no valid pixels."""

"""Random forests with out-of-bag prediction balls for metric-space responses."""

from ._core import (
    Forest,
    InvalidArgument,
    InvalidPoint,
    ParseError,
    __version__,
    distance,
    fit,
    load_forest,
    simulate,
    validate_geometry,
)

__all__ = [
    "Forest",
    "InvalidArgument",
    "InvalidPoint",
    "ParseError",
    "__version__",
    "distance",
    "fit",
    "load_forest",
    "simulate",
    "validate_geometry",
]

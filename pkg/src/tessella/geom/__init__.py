"""Exact plane geometry over Q(sqrt d), with a float fallback."""

from .numbers import (Surd, surd, rational, sign, exact_sqrt, get_tolerance, set_tolerance,
                      tolerance, is_exact)
from .plane import Point, UnitRotation, Isometry, compose, close, rotation_gk
from .polygon import (Polygon, polygon_area, interiors_overlap, intersection_area, contains,
                      hausdorff_distance, point_in_polygon, separated, orient, shoelace)

__all__ = [
    "Surd", "surd", "rational", "sign", "exact_sqrt", "get_tolerance", "set_tolerance",
    "tolerance", "is_exact", "Point", "UnitRotation", "Isometry", "compose", "close",
    "rotation_gk", "Polygon", "polygon_area", "interiors_overlap", "intersection_area",
    "contains", "hausdorff_distance", "point_in_polygon", "separated", "orient", "shoelace",
]

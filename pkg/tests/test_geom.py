import cmath
import math

import numpy as np
import pytest
from gmpy2 import mpq
from hypothesis import given, strategies as st

from tessella.errors import DegenerateGeometry, ModeMismatch
from tessella.geom import numbers as nb
from tessella.geom.plane import Isometry, Point, UnitRotation, compose, rotation_gk
from tessella.geom.polygon import (Polygon, clip_convex, contains, hausdorff_distance,
                                   interiors_overlap, intersection_area, point_in_polygon,
                                   polygon_area, separated, shoelace, triangulate)

small = st.integers(-6, 6)
fracs = st.fractions(min_value=-20, max_value=20, max_denominator=12)

# Pythagorean-triple rotations plus the quarter turns: all exactly unit
UNITS = [(1, 0), (0, 1), (-1, 0), (0, -1), (mpq(3, 5), mpq(4, 5)), (mpq(-5, 13), mpq(12, 13)),
         (mpq(8, 17), mpq(-15, 17))]


@st.composite
def isometries(draw):
    u = draw(st.sampled_from(UNITS))
    refl = draw(st.booleans())
    return Isometry(UnitRotation(Point(*u), refl), Point(draw(fracs), draw(fracs)))


points = st.builds(Point, fracs, fracs)


def as_complex(g, z):
    u = complex(g.rot.u)
    w = complex(z).conjugate() if g.reflect else complex(z)
    return u * w + complex(g.trans)


@given(isometries(), points)
def test_isometry_matches_complex_oracle(g, z):
    assert cmath.isclose(complex(g(z)), as_complex(g, z), abs_tol=1e-12)


@given(isometries(), isometries(), points)
def test_composition(g, h, z):
    assert (g @ h)(z) == g(h(z))


@given(isometries(), points)
def test_inverse(g, z):
    assert g.inverse()(g(z)) == z
    assert (g @ g.inverse()) == Isometry.identity()


@given(isometries(), points, points)
def test_preserves_distance(g, a, b):
    assert (g(a) - g(b)).norm2() == (a - b).norm2()


@given(isometries(), points, points, points)
def test_reflection_flips_orientation(g, a, b, c):
    from tessella.geom.polygon import orient
    o = orient(a, b, c)
    assert orient(g(a), g(b), g(c)) == (-o if g.reflect else o)


def test_non_unit_rotation_rejected():
    with pytest.raises(ValueError):
        UnitRotation(Point(1, 1))
    with pytest.raises(ValueError):
        UnitRotation(Point(0.6, 0.81))


def test_mixed_modes_rejected():
    g = Isometry.translation(Point(1, 0))
    h = Isometry.translation(Point(1.0, 0.0))
    with pytest.raises(ModeMismatch):
        compose(g, h)
    with pytest.raises(ModeMismatch):
        Point(1, 0) + Point(0.5, 0.0)


def test_rotation_about_center():
    g = Isometry.rotation(UnitRotation(Point(0, 1)), Point(1, 1))
    assert g(Point(1, 1)) == Point(1, 1)
    assert g(Point(2, 1)) == Point(1, 2)


def test_rotation_gk_pinwheel():
    # (2 - i)/sqrt5 is rational only after scaling by sqrt5
    lam = nb.surd(0, mpq(1, 5), 5)
    u = Point(2, -1) * lam
    g, k = rotation_gk(u, lam)
    assert k == 1 and g == Point(2, -1)
    assert UnitRotation.from_gk(g, k, lam).u == u


def test_angle_and_powers():
    r = UnitRotation(Point(mpq(3, 5), mpq(4, 5)))
    assert math.isclose(r.angle(), math.atan2(4, 3))
    assert (r ** 4).u == r.u * r.u * r.u * r.u
    assert (r * r.inverse()).is_identity()


# -- polygons -----------------------------------------------------------------------

SQ = Polygon([(0, 0), (1, 0), (1, 1), (0, 1)])
TRI = Polygon([(0, 0), (2, 0), (2, 1)])
L_SHAPE = Polygon([(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)])


def shapely_area(P, Q):
    shapely = pytest.importorskip("shapely.geometry")
    a = shapely.Polygon([(float(v.x), float(v.y)) for v in P.vertices])
    b = shapely.Polygon([(float(v.x), float(v.y)) for v in Q.vertices])
    return a.intersection(b).area


def test_areas():
    assert SQ.area() == 1
    assert TRI.area() == 1
    assert L_SHAPE.area() == 3
    assert shoelace([Point(0, 0), Point(1, 0), Point(0, 1)]) == mpq(1, 2)
    assert polygon_area(SQ) == 1


def test_orientation_and_simplicity_checked():
    with pytest.raises(DegenerateGeometry):
        Polygon([(0, 0), (0, 1), (1, 0)])            # clockwise
    with pytest.raises(DegenerateGeometry):
        Polygon([(0, 0), (2, 2), (2, 0), (0, 2)])    # bow tie
    assert Polygon.ccw([(0, 0), (0, 1), (1, 0)]).area() == mpq(1, 2)


@given(fracs, fracs)
def test_intersection_area_matches_shapely(dx, dy):
    moved = L_SHAPE.translated(Point(dx, dy))
    exact = intersection_area(L_SHAPE, moved)
    assert math.isclose(float(exact), shapely_area(L_SHAPE, moved), abs_tol=1e-9)


def test_clip_convex():
    half = clip_convex(list(SQ.vertices), [Point(0, 0), Point(1, 0), Point(1, 1)])
    assert shoelace(half) == mpq(1, 2)


def test_touching_is_not_overlap():
    right = SQ.translated(Point(1, 0))
    assert interiors_overlap(SQ, right)[0] is False
    assert separated(SQ, right)
    corner = SQ.translated(Point(1, 1))
    assert interiors_overlap(SQ, corner)[0] is False
    hit, area = interiors_overlap(SQ, SQ.translated(Point(mpq(1, 3), mpq(1, 3))))
    assert hit and area == mpq(4, 9)


def test_nonconvex_overlap_via_triangulation():
    notch = SQ.translated(Point(mpq(3, 4), mpq(3, 4)))
    hit, area = interiors_overlap(L_SHAPE, notch)
    assert hit and area == mpq(7, 16)
    assert area == intersection_area(L_SHAPE, notch)
    assert math.isclose(float(area), shapely_area(L_SHAPE, notch), abs_tol=1e-12)


def test_triangulate_covers():
    tris = triangulate(L_SHAPE)
    assert len(tris) == 4
    assert sum(shoelace(t) for t in tris) == L_SHAPE.area()


def test_contains_and_points():
    assert contains(Polygon([(0, 0), (4, 0), (4, 4), (0, 4)]), SQ)
    assert not contains(SQ, TRI)
    assert point_in_polygon(Point(mpq(1, 2), mpq(1, 2)), SQ)
    assert not point_in_polygon(Point(2, 2), SQ)


def test_reflected_polygon_stays_ccw():
    g = Isometry(UnitRotation(Point(1, 0), True), Point(0, 0))
    img = TRI.transformed(g)
    assert img.area() == TRI.area()
    assert img.vertex_set() == {Point(0, 0).key(), Point(2, 0).key(), Point(2, -1).key()}


def test_set_equality_ignores_start_vertex():
    assert Polygon([(1, 0), (1, 1), (0, 1), (0, 0)]) == SQ


@given(fracs, fracs)
def test_hausdorff_of_translate(dx, dy):
    d = hausdorff_distance(TRI, TRI.translated(Point(dx, dy)))
    assert math.isclose(d, math.hypot(dx, dy), rel_tol=1e-9, abs_tol=1e-12)


def test_hausdorff_properties():
    a, b = TRI, SQ.translated(Point(3, 0))
    assert hausdorff_distance(a, a) == 0
    assert hausdorff_distance(a, b) == hausdorff_distance(b, a) > 0
    # nonconvex input goes through boundary sampling
    d = hausdorff_distance(L_SHAPE, L_SHAPE.translated(Point(mpq(1, 10), 0)))
    # sampling spacing is diameter/256
    assert math.isclose(d, 0.1, abs_tol=float(L_SHAPE.diameter()) / 256)


def test_float_views():
    arr = TRI.as_array()
    assert isinstance(arr, np.ndarray) and arr.shape == (3, 2)
    assert TRI.to_float().area() == pytest.approx(1.0)

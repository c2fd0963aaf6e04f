import io
import math

import numpy as np
import pytest
from gmpy2 import mpq
from hypothesis import given, strategies as st

from tessella.engine import (boundary_ratio, dump_patch, inflate_patch, inflate_tile,
                             iterate, load_patch, patch_to_dict, substitution_counts,
                             support_polygon)
from tessella.errors import PatchTooLarge, UnknownTileType
from tessella.geom.plane import Isometry, Point, UnitRotation
from tessella.geom.polygon import Polygon, contains

shapely = pytest.importorskip("shapely")
from shapely.geometry import Polygon as SPoly  # noqa: E402
from shapely.ops import unary_union  # noqa: E402


def _shapes(patch, rule):
    return [SPoly(v) for v in patch.float_vertices(rule)]


def test_seed_and_r0(pinwheel):
    p = iterate(pinwheel, 1, 0)
    assert len(p) == 1 and p.tiles[0].type == 1
    assert p.tiles[0].pose == Isometry.identity()


def test_unknown_seed(pinwheel):
    with pytest.raises(UnknownTileType):
        iterate(pinwheel, 2, 1)


@pytest.mark.parametrize("r,n", [(1, 5), (2, 25), (3, 125)])
def test_pinwheel_counts(pinwheel, r, n):
    p = iterate(pinwheel, 0, r)
    assert len(p) == n
    assert sum(p.type_counts(2)) == n


def test_square_counts(square):
    assert len(iterate(square, 0, 1)) == 4
    assert len(iterate(square, 0, 3)) == 64


def test_substitution_counts(pinwheel, square):
    assert substitution_counts(pinwheel) == [[2, 3], [3, 2]]
    assert substitution_counts(square) == [[4]]


@pytest.mark.parametrize("r", [1, 2, 3])
def test_patch_tiles_support_exactly(pinwheel, r):
    p = iterate(pinwheel, 0, r)
    region = support_polygon(pinwheel, p)
    polys = p.polygons(pinwheel)
    assert sum((q.area() for q in polys), mpq(0)) == region.area()
    assert all(contains(region, q) for q in polys)
    # independent check: the union has no holes or overlaps
    union = unary_union(_shapes(p, pinwheel))
    assert math.isclose(union.area, float(region.area()), rel_tol=1e-12)
    assert math.isclose(union.symmetric_difference(SPoly(region.to_float().as_array())).area, 0,
                        abs_tol=1e-9)


def test_tiles_are_unit_size(pinwheel):
    # the frame expands, so every tile stays congruent to a prototile
    for q in iterate(pinwheel, 0, 3).polygons(pinwheel):
        assert sorted((b - a).norm2() for a, b in q.edges()) == [1, 4, 5]


def test_scale_is_tracked(pinwheel):
    p = iterate(pinwheel, 0, 3)
    assert p.scale == 3 and p.r == 3


def test_gaussian_coordinates(pinwheel):
    # coordinates are Gaussian rationals with denominators dividing 5^r
    p = iterate(pinwheel, 0, 4)
    for rec in p.records[:200]:
        for v in (rec[1], rec[2], rec[4], rec[5]):
            den = int(mpq(v).denominator)
            while den % 5 == 0:
                den //= 5
            assert den == 1


def test_inflate_tile_matches_patch(pinwheel):
    t = iterate(pinwheel, 0, 1).tiles[3]
    kids = inflate_tile(pinwheel, t)
    assert len(kids) == 5 and all(k.gen_scale == 2 for k in kids)
    whole = iterate(pinwheel, 0, 2)
    keys = {k.record() for k in kids}
    assert keys <= set(whole.records)


def test_inflation_is_a_semigroup(pinwheel):
    a = inflate_patch(pinwheel, iterate(pinwheel, 0, 2), 2)
    b = iterate(pinwheel, 0, 4)
    assert a == b


def test_cap(pinwheel, monkeypatch):
    with pytest.raises(PatchTooLarge) as info:
        iterate(pinwheel, 0, 3, cap=100)
    assert info.value.projected == 125
    monkeypatch.setenv("TESSELLA_CAP", "30")
    with pytest.raises(PatchTooLarge):
        iterate(pinwheel, 0, 3)
    assert len(iterate(pinwheel, 0, 2)) == 25


def test_workers_deterministic(pinwheel, mirror):
    for rule in (pinwheel, mirror):
        one = iterate(rule, 0, 5, workers=1)
        many = iterate(rule, 0, 5, workers=3)
        assert one == many
        assert one.records == many.records


def test_float_mode_matches_exact(pinwheel):
    from tessella.rules import to_float_rule
    fr = to_float_rule(pinwheel)
    ex = np.concatenate(iterate(pinwheel, 0, 3).float_vertices(pinwheel))
    fl = np.concatenate(iterate(fr, 0, 3).float_vertices(fr))
    assert np.allclose(np.sort(ex, axis=0), np.sort(fl, axis=0), atol=1e-9)


def test_reflected_poses_tile_correctly(mirror):
    p = iterate(mirror, 0, 3)
    assert p.reflect_flags().any() and not p.reflect_flags().all()
    region = support_polygon(mirror, p)
    union = unary_union(_shapes(p, mirror))
    assert math.isclose(union.area, float(region.area()), rel_tol=1e-12)
    assert sum(s.area for s in _shapes(p, mirror)) == pytest.approx(float(region.area()))


def test_mirror_same_geometry_as_pinwheel(pinwheel, mirror):
    # the two encodings place identical triangles
    a = {frozenset(map(tuple, np.round(v, 9))) for v in iterate(pinwheel, 0, 3).float_vertices(pinwheel)}
    b = {frozenset(map(tuple, np.round(v, 9))) for v in iterate(mirror, 0, 3).float_vertices(mirror)}
    assert a == b


def test_patch_io_roundtrip(pinwheel, mirror, tmp_path):
    for rule in (pinwheel, mirror):
        p = iterate(rule, 0, 2)
        buf = io.StringIO()
        dump_patch(p, buf)
        buf.seek(0)
        q = load_patch(buf)
        assert q == p
        assert q.rule_hash == rule.hash()
        assert patch_to_dict(q) == patch_to_dict(p)


def test_transformed(pinwheel):
    p = iterate(pinwheel, 0, 2)
    g = Isometry(UnitRotation(Point(mpq(3, 5), mpq(4, 5)), True), Point(7, -2))
    q = p.transformed(g)
    assert len(q) == len(p)
    assert sum(x.area() for x in q.polygons(pinwheel)) == 25


def test_angles_frame_free(pinwheel):
    # angles are measured against the unexpanded frame: the seed tile has angle 0
    p = iterate(pinwheel, 0, 0)
    assert p.angles()[0] == 0
    q = iterate(pinwheel, 0, 1)
    assert len(q.angles()) == 5


# -- boundary ratio ---------------------------------------------------------------

UNIT = Polygon([(0, 0), (1, 0), (1, 1), (0, 1)])


def test_boundary_ratio_square_exact():
    rep = boundary_ratio(UNIT, 4)
    assert rep.method == "exact" and rep.ratio == mpq(3, 4)
    assert boundary_ratio(UNIT, 100).ratio == mpq(4, 100) - mpq(4, 100 ** 2)
    assert boundary_ratio(UNIT, 2).ratio == 1


@given(st.integers(2, 200))
def test_boundary_ratio_square_formula(t):
    # 1 - (t - 2)^2 / t^2
    assert boundary_ratio(UNIT, t).ratio == 1 - mpq((t - 2) ** 2, t * t)


def test_boundary_ratio_triangle_exact(pinwheel):
    tri = pinwheel.prototiles[0].shape
    rep = boundary_ratio(tri, 20)
    assert rep.method == "exact"
    # oracle: shapely inward buffer
    big = SPoly([(0, 0), (40, 0), (40, 20)])
    want = 1 - big.buffer(-1.0, join_style=2).area / big.area
    assert math.isclose(float(rep.ratio), want, rel_tol=1e-9)


def test_boundary_ratio_monte_carlo():
    # edge lengths sqrt 8, sqrt 13, sqrt 10 leave every quadratic field: sampling
    hexa = Polygon([(0, 0), (3, 0), (5, 2), (3, 5), (0, 5), (-1, 2)])
    rep = boundary_ratio(hexa, 10, samples=100_000, seed=7)
    big = SPoly([(10 * float(v.x), 10 * float(v.y)) for v in hexa.vertices])
    want = 1 - big.buffer(-1.0, join_style=2).area / big.area
    assert rep.method == "monte-carlo" and rep.seed == 7
    assert abs(rep.ratio - want) < 5 * rep.stderr + 1e-3
    again = boundary_ratio(hexa, 10, samples=100_000, seed=7)
    assert again.ratio == rep.ratio

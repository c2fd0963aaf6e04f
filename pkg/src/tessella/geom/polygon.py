"""Simple polygons: area, clipping, overlap, containment, Hausdorff distance.

All predicates reduce to the sign of a 2x2 determinant, which is exact for
exact coordinates and tolerance-snapped for floats.
"""

import math

import numpy as np

from ..errors import DegenerateGeometry, ModeMismatch
from . import numbers as nb
from .plane import Point


def orient(a, b, c):
    """Sign of the turn a -> b -> c (+1 left, -1 right, 0 collinear)."""
    return nb.sign((b - a).cross(c - a))


def shoelace(points):
    """Signed area of a closed vertex loop (no validity checks)."""
    n = len(points)
    if n < 3:
        return points[0].x * 0 if points else 0
    s = 0
    for i in range(n):
        p, q = points[i], points[(i + 1) % n]
        s = s + (p.x * q.y - p.y * q.x)
    return s / 2


def _segments_cross(p1, p2, q1, q2):
    """Closed segments p1p2 and q1q2 share at least one point."""
    d1, d2 = orient(q1, q2, p1), orient(q1, q2, p2)
    d3, d4 = orient(p1, p2, q1), orient(p1, p2, q2)
    if d1 * d2 < 0 and d3 * d4 < 0:
        return True
    return ((d1 == 0 and _on_segment(q1, q2, p1)) or (d2 == 0 and _on_segment(q1, q2, p2))
            or (d3 == 0 and _on_segment(p1, p2, q1)) or (d4 == 0 and _on_segment(p1, p2, q2)))


def _on_segment(a, b, p):
    return (nb.sign(min(a.x, b.x) - p.x) <= 0 <= nb.sign(max(a.x, b.x) - p.x)
            and nb.sign(min(a.y, b.y) - p.y) <= 0 <= nb.sign(max(a.y, b.y) - p.y))


class Polygon:
    """A simple polygon with counterclockwise vertices."""

    __slots__ = ("vertices", "_area", "_convex")

    def __init__(self, vertices, check=True):
        vertices = [v if isinstance(v, Point) else Point(*v) for v in vertices]
        self.vertices = tuple(vertices)
        self._area = None
        self._convex = None
        if check:
            self._validate()

    @classmethod
    def ccw(cls, vertices):
        """Build from vertices in either orientation."""
        vs = [v if isinstance(v, Point) else Point(*v) for v in vertices]
        if len(vs) >= 3 and nb.sign(shoelace(vs)) < 0:
            vs.reverse()
        return cls(vs)

    def _validate(self):
        vs = self.vertices
        n = len(vs)
        if n < 3:
            raise DegenerateGeometry("a polygon needs at least 3 vertices")
        if len({v.exact for v in vs}) != 1:
            raise ModeMismatch("polygon vertices mix exact and approximate coordinates")
        for i in range(n):
            if _same(vs[i], vs[(i + 1) % n]):
                raise DegenerateGeometry(f"repeated consecutive vertex {vs[i]}")
        a = shoelace(vs)
        if nb.sign(a) == 0:
            raise DegenerateGeometry("polygon has zero area")
        if nb.sign(a) < 0:
            raise DegenerateGeometry("polygon vertices are clockwise")
        if n > 3:
            for i in range(n):
                for j in range(i + 2, n):
                    if i == 0 and j == n - 1:
                        continue
                    if _segments_cross(vs[i], vs[(i + 1) % n], vs[j], vs[(j + 1) % n]):
                        raise DegenerateGeometry("polygon is not simple")
        self._area = a

    @property
    def exact(self):
        return self.vertices[0].exact

    def __len__(self):
        return len(self.vertices)

    def __iter__(self):
        return iter(self.vertices)

    def edges(self):
        vs = self.vertices
        return [(vs[i], vs[(i + 1) % len(vs)]) for i in range(len(vs))]

    def area(self):
        if self._area is None:
            self._area = shoelace(self.vertices)
        return self._area

    def is_convex(self):
        if self._convex is None:
            vs, n = self.vertices, len(self.vertices)
            self._convex = all(orient(vs[i], vs[(i + 1) % n], vs[(i + 2) % n]) >= 0
                               for i in range(n))
        return self._convex

    def transformed(self, g):
        """Image under an isometry (orientation restored if ``g`` reflects)."""
        vs = [g(v) for v in self.vertices]
        if g.reflect:
            vs.reverse()
        return Polygon(vs, check=False)

    def scaled(self, t):
        return Polygon([v * t for v in self.vertices], check=False)

    def translated(self, p):
        return Polygon([v + p for v in self.vertices], check=False)

    def to_float(self):
        return Polygon([v.to_float() for v in self.vertices], check=False)

    def as_array(self):
        return np.array([[float(v.x), float(v.y)] for v in self.vertices])

    def bbox(self):
        a = self.as_array()
        return a.min(axis=0), a.max(axis=0)

    def diameter(self):
        a = self.as_array()
        return float(max(np.hypot(*(p - q)) for p in a for q in a))

    def centroid(self):
        s = sum((v for v in self.vertices[1:]), self.vertices[0])
        return s / len(self.vertices)

    def vertex_set(self):
        return frozenset(v.key() for v in self.vertices)

    def __eq__(self, other):
        """Equal as point sets (same vertices up to cyclic shift)."""
        if not isinstance(other, Polygon) or len(self) != len(other):
            return False
        n = len(self)
        for s in range(n):
            if all(_same(self.vertices[i], other.vertices[(i + s) % n]) for i in range(n)):
                return True
        return False

    __hash__ = None

    def __repr__(self):
        return "Polygon([" + ", ".join(f"({v.x}, {v.y})" for v in self.vertices) + "])"


def _same(p, q):
    if p.exact and q.exact:
        return p == q
    return abs(complex(p) - complex(q)) <= nb.get_tolerance()


def polygon_area(P):
    a = P.area()
    if nb.sign(a) <= 0:
        raise DegenerateGeometry("polygon has non-positive area")
    return a


# -- clipping ---------------------------------------------------------------

def clip_convex(subject, clip):
    """Sutherland-Hodgman: ``subject`` (vertex list) clipped to convex ``clip``.

    Returns a vertex list, possibly degenerate or empty.
    """
    out = list(subject)
    cv = list(clip)
    for i in range(len(cv)):
        if not out:
            break
        a, b = cv[i], cv[(i + 1) % len(cv)]
        e = b - a
        inp, out = out, []
        prev = inp[-1]
        sp = nb.sign(e.cross(prev - a))
        for cur in inp:
            sc = nb.sign(e.cross(cur - a))
            if sc >= 0:
                if sp < 0:
                    out.append(_intersect(a, e, prev, cur))
                out.append(cur)
            elif sp > 0:
                out.append(_intersect(a, e, prev, cur))
            prev, sp = cur, sc
    return out


def _intersect(a, e, p, q):
    dp = e.cross(p - a)
    dq = e.cross(q - a)
    return p + (q - p) * (dp / (dp - dq))


def triangulate(P):
    """Ear-clipping triangulation of a simple ccw polygon."""
    vs = list(P.vertices)
    if len(vs) == 3:
        return [vs]
    tris = []
    idx = list(range(len(vs)))
    guard = 0
    while len(idx) > 3:
        n = len(idx)
        for k in range(n):
            i, j, l = idx[k - 1], idx[k], idx[(k + 1) % n]
            a, b, c = vs[i], vs[j], vs[l]
            if orient(a, b, c) <= 0:
                continue
            if any(_in_closed_triangle(vs[m], a, b, c) for m in idx if m not in (i, j, l)):
                continue
            tris.append([a, b, c])
            del idx[k]
            break
        else:
            guard += 1
            if guard > 1:
                raise DegenerateGeometry("ear clipping failed; polygon not simple")
            # drop a collinear vertex and retry
            for k in range(len(idx)):
                if orient(vs[idx[k - 1]], vs[idx[k]], vs[idx[(k + 1) % len(idx)]]) == 0:
                    del idx[k]
                    break
    tris.append([vs[m] for m in idx])
    return tris


def _in_closed_triangle(p, a, b, c):
    return orient(a, b, p) >= 0 and orient(b, c, p) >= 0 and orient(c, a, p) >= 0


def convex_pieces(P):
    return [P.vertices] if P.is_convex() else triangulate(P)


def intersection_area(P, Q):
    """Area of the intersection of two simple polygons."""
    if P.exact != Q.exact:
        raise ModeMismatch("cannot intersect exact and approximate polygons")
    total = 0
    for p in convex_pieces(P):
        for q in convex_pieces(Q):
            piece = clip_convex(p, q)
            if len(piece) >= 3:
                total = total + shoelace(piece)
    return total


def _bbox_disjoint(P, Q):
    (pmin, pmax), (qmin, qmax) = P.bbox(), Q.bbox()
    margin = 1e-9 * (1 + max(np.abs(pmin).max(), np.abs(pmax).max()))
    return bool(np.any(pmax < qmin - margin) or np.any(qmax < pmin - margin))


def interiors_overlap(P, Q):
    """Whether the interiors meet in positive area; returns ``(flag, area)``."""
    if _bbox_disjoint(P, Q):
        return False, P.area() * 0
    a = intersection_area(P, Q)
    return nb.sign(a) > 0, a


def separated(P, Q):
    """Convex polygons with disjoint interiors: a separating edge line exists.

    Cheaper than clipping; only valid when both are convex.
    """
    for A, B in ((P, Q), (Q, P)):
        vs = A.vertices
        n = len(vs)
        for i in range(n):
            a = vs[i]
            e = vs[(i + 1) % n] - a
            if all(nb.sign(e.cross(v - a)) <= 0 for v in B.vertices):
                return True
    return False


def point_in_polygon(p, P):
    """Closed containment test (boundary counts as inside)."""
    vs = P.vertices
    n = len(vs)
    for i in range(n):
        a, b = vs[i], vs[(i + 1) % n]
        if orient(a, b, p) == 0 and _on_segment(a, b, p):
            return True
    if P.is_convex():
        return all(orient(vs[i], vs[(i + 1) % n], p) >= 0 for i in range(n))
    inside = False
    for i in range(n):
        a, b = vs[i], vs[(i + 1) % n]
        if (nb.sign(a.y - p.y) > 0) != (nb.sign(b.y - p.y) > 0):
            # crossing x-coordinate compared exactly via the orientation sign
            o = orient(a, b, p)
            if (o > 0) == (nb.sign(b.y - a.y) > 0):
                inside = not inside
    return inside


def contains(P, Q):
    """Whether ``Q`` is a subset of ``P`` (boundary contact allowed)."""
    if P.is_convex():
        return all(point_in_polygon(v, P) for v in Q.vertices)
    deficit = Q.area() - intersection_area(P, Q)
    if Q.exact:
        return nb.sign(deficit) == 0
    return abs(deficit) <= nb.get_tolerance() * max(1.0, float(Q.area()))


# -- Hausdorff distance -------------------------------------------------------

def _point_segment_dist(p, a, b):
    ab = b - a
    L = ab @ ab
    if L == 0:
        return np.hypot(*(p - a))
    t = np.clip(((p - a) @ ab) / L, 0.0, 1.0)
    return np.hypot(*(p - a - t * ab))


def _float_inside(p, arr):
    x, y = p
    inside = False
    n = len(arr)
    for i in range(n):
        (x1, y1), (x2, y2) = arr[i], arr[(i + 1) % n]
        if (y1 > y) != (y2 > y):
            xc = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if xc > x:
                inside = not inside
    return inside


def _dist_to_region(p, arr):
    if _float_inside(p, arr):
        return 0.0
    n = len(arr)
    return min(_point_segment_dist(p, arr[i], arr[(i + 1) % n]) for i in range(n))


SAMPLES_PER_DIAMETER = 256


def _samples(P):
    """Vertices, boundary points and interior grid points of ``P``.

    Boundary spacing and interior grid pitch are diameter / 256.
    """
    arr = P.as_array()
    h = P.diameter() / SAMPLES_PER_DIAMETER
    pts = [v for v in arr]
    n = len(arr)
    for i in range(n):
        a, b = arr[i], arr[(i + 1) % n]
        k = max(1, int(math.ceil(np.hypot(*(b - a)) / h)))
        for s in range(1, k):
            pts.append(a + (b - a) * (s / k))
    lo, hi = arr.min(axis=0), arr.max(axis=0)
    for x in np.arange(lo[0] + h / 2, hi[0], h):
        for y in np.arange(lo[1] + h / 2, hi[1], h):
            if _float_inside((x, y), arr):
                pts.append(np.array([x, y]))
    return pts


def _directed(P, Q):
    qa = Q.as_array()
    pts = P.as_array() if (P.is_convex() and Q.is_convex()) else _samples(P)
    return max(_dist_to_region(p, qa) for p in pts)


def hausdorff_distance(P, Q):
    """Hausdorff distance between two polygonal regions, as a float.

    Exact up to rounding when both are convex (the distance to a convex set
    is convex, so the supremum is attained at a vertex); otherwise the
    supremum is taken over vertices, boundary samples and an interior grid
    at pitch diameter/256.
    """
    return float(max(_directed(P, Q), _directed(Q, P)))

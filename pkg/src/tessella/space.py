"""Finite probes of the tiling space.

* :func:`patch_distance`: the neighbourhood metric truncated to a disk the
  patches actually cover.
* :func:`congruent_subpatch`: is a small patch congruent to part of some ``F^r(P)``?
* :func:`adjacency_census`: how tiles meet along edges, up to congruence.
"""

import math
from collections import Counter
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .engine import Patch, iterate, support_polygon, Tile
from .errors import InsufficientRadius, ModeMismatch, PatchTooLarge
from .geom import numbers as nb
from .geom.plane import Isometry, Point, UnitRotation, rotation_gk
from .geom.polygon import hausdorff_distance, orient, Polygon
from .rules import prototile_symmetries


# -- metric ------------------------------------------------------------------------

@dataclass
class CenteredPatch:
    patch: Patch
    origin: tuple          # float (x, y)
    radius: float
    rule: object

    def vertices(self):
        """Float vertex arrays relative to the origin (cached)."""
        cached = self.__dict__.get("_vertices")
        if cached is None:
            o = np.asarray(self.origin, dtype=float)
            cached = [v - o for v in self.patch.float_vertices(self.rule)]
            self.__dict__["_vertices"] = cached
        return cached


def _origin_distances(polys):
    """Distance from (0, 0) to each float ccw polygon region."""
    out = np.empty(len(polys))
    groups = {}
    for i, p in enumerate(polys):
        groups.setdefault(len(p), []).append(i)
    for n, idx in groups.items():
        A = np.stack([polys[i] for i in idx])
        out[idx] = _directed_batch(np.zeros((len(idx), 1, 2)), A)
    return out


def centered(rule, seed_type, r, origin=None, cap=None):
    """``F^r(P)`` with the largest disk it is guaranteed to cover.

    ``origin`` defaults to the incenter of the covered region.
    """
    patch = iterate(rule, seed_type, r, cap=cap)
    region = support_polygon(rule, patch).to_float().as_array()
    if origin is None:
        n = len(region)
        lengths = np.array([np.hypot(*(region[(i + 1) % n] - region[i])) for i in range(n)])
        if n == 3:
            # incenter: vertices weighted by the opposite side lengths
            w = np.array([lengths[1], lengths[2], lengths[0]])
            origin = tuple((region * w[:, None]).sum(axis=0) / w.sum())
        else:
            origin = tuple(region.mean(axis=0))
    o = np.asarray(origin, dtype=float)
    rel = region - o
    n = len(rel)
    radius = min(_seg_dist(rel[i], rel[(i + 1) % n]) for i in range(n))
    return CenteredPatch(patch, tuple(float(c) for c in origin), float(radius), rule)


def _seg_dist(a, b):
    ab = b - a
    t = min(1.0, max(0.0, float(-(a @ ab) / (ab @ ab))))
    return math.hypot(*(a + t * ab))


def translated(cp, dx, dy):
    """The same tiling shifted by ``(dx, dy)`` while the origin stays put."""
    if cp.patch.exact and not (isinstance(dx, float) or isinstance(dy, float)):
        g = Isometry.translation(Point(dx, dy))
        patch = cp.patch.transformed(g)
    else:
        patch = to_float_patch(cp.patch)
        patch = patch.transformed(Isometry.translation(Point(float(dx), float(dy))))
    return CenteredPatch(patch, cp.origin, cp.radius - math.hypot(float(dx), float(dy)), cp.rule)


def to_float_patch(patch):
    recs = [(t, float(a), float(b), f, float(c), float(d)) for t, a, b, f, c, d in patch.records]
    return Patch(recs, patch.scale, patch.seed_type, patch.r, patch.rule_hash,
                 patch.expansion, patch.radicand, None if patch.lam is None else float(patch.lam))


def replace_tile(cp, index, pose):
    """Copy of a centered patch with one tile moved to ``pose`` (float mode)."""
    patch = to_float_patch(cp.patch)
    tiles = list(patch.tiles)
    tiles[index] = Tile(tiles[index].type, pose, tiles[index].gen_scale)
    new = Patch([t.record() for t in tiles], patch.scale, patch.seed_type, patch.r,
                patch.rule_hash, patch.expansion, patch.radicand, patch.lam)
    return CenteredPatch(new, cp.origin, cp.radius, cp.rule)


def _hausdorff_convex_batch(A, B):
    """Hausdorff distances between paired convex ccw polygons (arrays (k, n, 2))."""
    return np.maximum(_directed_batch(A, B), _directed_batch(B, A))


def _directed_batch(A, B):
    k, n, _ = B.shape
    worst = np.zeros(len(A))
    for v in range(A.shape[1]):
        p = A[:, v, :]
        inside = np.ones(k, dtype=bool)
        best = np.full(k, np.inf)
        for i in range(n):
            a, b = B[:, i, :], B[:, (i + 1) % n, :]
            ab = b - a
            ap = p - a
            cr = ab[:, 0] * ap[:, 1] - ab[:, 1] * ap[:, 0]
            inside &= cr >= 0
            t = np.clip((ap * ab).sum(axis=1) / (ab * ab).sum(axis=1), 0.0, 1.0)
            d = np.hypot(*(ap - t[:, None] * ab).T)
            best = np.minimum(best, d)
        worst = np.maximum(worst, np.where(inside, 0.0, best))
    return worst


def _nearest_match(src, dst):
    """For each polygon in ``src``, the smallest Hausdorff distance (<= 1) to ``dst``.

    Distances above 1 are reported as ``inf``; the metric never needs them.
    """
    out = np.full(len(src), np.inf)
    if not len(src) or not len(dst):
        return out
    cd = np.array([p.mean(axis=0) for p in dst])
    spread = max(float(np.hypot(*(p - c).T).max()) for p, c in zip(dst, cd))
    # h <= 1 puts src's first vertex within 1 of dst, hence within 1 + spread of its mean
    tree = cKDTree(cd)
    pairs = tree.query_ball_point(np.array([p[0] for p in src]), r=1.0 + spread)
    same_shape = len({p.shape for p in src} | {p.shape for p in dst}) == 1
    if same_shape:
        ii = np.fromiter((i for i, js in enumerate(pairs) for _ in js), dtype=np.int64)
        jj = np.fromiter((j for js in pairs for j in js), dtype=np.int64)
        if len(ii):
            S = np.stack(src)[ii]
            D = np.stack(dst)[jj]
            h = _hausdorff_convex_batch(S, D)
            np.minimum.at(out, ii, np.where(h <= 1.0, h, np.inf))
        return out
    for i, js in enumerate(pairs):
        for j in js:
            P = Polygon([tuple(v) for v in src[i]], check=False)
            Q = Polygon([tuple(v) for v in dst[j]], check=False)
            h = hausdorff_distance(P, Q)
            if h <= 1.0:
                out[i] = min(out[i], h)
    return out


@dataclass
class MetricReport:
    epsilon: float
    radius_used: float
    floor_hit: bool
    floor: float

    def to_dict(self):
        return {"epsilon": self.epsilon, "radius_used": self.radius_used,
                "floor_hit": self.floor_hit, "floor": self.floor}


def patch_distance(T, U, floor=1e-3, resolution=1e-6):
    """Truncated neighbourhood distance between two centered patches.

    The smallest ``eps`` such that, within radius ``1/eps`` of the origin,
    every tile of either patch has a tile of the other within Hausdorff
    distance ``eps``.  ``eps`` cannot go below the inverse coverage radius,
    so the effective floor is ``max(floor, 1/radius)``.
    """
    radius = min(T.radius, U.radius)
    if radius < 1.0:
        raise InsufficientRadius(f"coverage radius {radius:.3g} < 1; eps = 1 is already untestable")
    eff_floor = max(floor, 1.0 / radius)
    tv, uv = T.vertices(), U.vertices()
    diam = max(float(np.ptp(v, axis=0).max()) for v in tv + uv) * 1.5 + 1.0
    d_t, d_u = _origin_distances(tv), _origin_distances(uv)
    # tiles beyond 1/eff_floor never enter the test; their matches lie nearby
    reach = 1.0 / eff_floor
    keep_t, keep_u = d_t <= reach + diam + 1, d_u <= reach + diam + 1
    tv = [v for v, k in zip(tv, keep_t) if k]
    uv = [v for v, k in zip(uv, keep_u) if k]
    d_t, d_u = d_t[keep_t], d_u[keep_u]
    h_t = _nearest_match(tv, uv)
    h_u = _nearest_match(uv, tv)

    def holds(eps):
        R = 1.0 / eps
        return bool(np.all(h_t[d_t <= R] <= eps) and np.all(h_u[d_u <= R] <= eps))

    if holds(eff_floor):
        return MetricReport(eff_floor, 1.0 / eff_floor, True, eff_floor)
    if not holds(1.0):
        return MetricReport(1.0, 1.0, False, eff_floor)
    lo, hi = eff_floor, 1.0
    while hi - lo > resolution:
        mid = (lo + hi) / 2
        if holds(mid):
            hi = mid
        else:
            lo = mid
    return MetricReport(hi, 1.0 / hi, False, eff_floor)


# -- congruent sub-patches -------------------------------------------------------------

@dataclass
class CongruenceResult:
    found: bool
    witness: Isometry = None
    prototile: int = None
    count: int = 0


def _tile_key(rule, typ, pose):
    poly = rule.prototiles[typ].shape.transformed(pose)
    return (typ, poly.vertex_set())


def congruent_subpatch(rule, query, r, cap=None, count_all=False, max_query=64):
    """Search for an isometry taking ``query`` onto part of some ``F^r(P)``.

    The query's first tile is aligned with every same-type tile of
    ``F^r(P)`` in every way the prototile allows (its symmetry group,
    reflections included); the remaining tiles are then checked exactly.
    The search is exhaustive.
    """
    qtiles = list(query.tiles)
    if not qtiles:
        return CongruenceResult(True, Isometry.identity(rule.exact), None, 1)
    if len(qtiles) > max_query:
        raise ValueError(f"query has {len(qtiles)} tiles; at most {max_query} supported")
    if query.exact != rule.exact:
        raise ModeMismatch("query and rule use different scalar modes")
    syms = [prototile_symmetries(p.shape) for p in rule.prototiles]
    anchor = qtiles[0]
    anchor_inv = anchor.pose.inverse()
    result = CongruenceResult(False)
    for k in range(rule.size):
        target = iterate(rule, k, r, cap=cap)
        index = {_tile_key(rule, t.type, t.pose) for t in target.tiles}
        for t in target.tiles:
            if t.type != anchor.type:
                continue
            for s in syms[anchor.type]:
                g = t.pose @ s @ anchor_inv
                if all(_tile_key(rule, q.type, g @ q.pose) in index for q in qtiles[1:]):
                    if not result.found:
                        result = CongruenceResult(True, g, k, 0)
                    result.count += 1
                    if not count_all:
                        return result
    return result


# -- adjacency census ------------------------------------------------------------------

@dataclass(frozen=True)
class AdjacencyConfiguration:
    type_a: int
    type_b: int
    relative_pose: Isometry
    count: int

    def to_dict(self):
        rel = self.relative_pose
        u, t = rel.rot.u, rel.trans
        num = (lambda v: v if isinstance(v, float) else nb.to_text(v))
        return {"type_a": self.type_a, "type_b": self.type_b,
                "relative_pose": {"rot": {"g_re": num(u.x), "g_im": num(u.y), "k": 0},
                                  "reflect": rel.reflect,
                                  "trans": {"x": num(t.x), "y": num(t.y)}},
                "count": self.count}


def _pose_key(g):
    return (g.rot.u.x, g.rot.u.y, g.rot.reflect, g.trans.x, g.trans.y)


def _segment_overlap(a, b, c, d):
    """Collinear edges ab and cd overlap in a segment of positive length."""
    if orient(a, b, c) != 0 or orient(a, b, d) != 0:
        return False
    e = b - a
    L = e.dot(e)
    tc, td = e.dot(c - a), e.dot(d - a)
    lo = max(min(tc, td), 0 * L)
    hi = min(max(tc, td), L)
    if isinstance(L, float):
        return (hi - lo) / math.sqrt(L) > nb.get_tolerance()
    return nb.sign(hi - lo) > 0


def _candidate_edges(verts, tol=1e-7):
    """Tile pairs with a float-collinear, overlapping edge pair: ``(i, j, ei, ej)``."""
    cents = np.array([v.mean(axis=0) for v in verts])
    reach = 2 * max(float(np.hypot(*(v - v.mean(axis=0)).T).max()) for v in verts) + 1e-6
    pairs = cKDTree(cents).query_pairs(reach, output_type="ndarray")
    if not len(pairs):
        return []
    sizes = np.array([len(v) for v in verts])
    out = []
    for n in np.unique(sizes[pairs[:, 0]]):
        for m in np.unique(sizes[pairs[:, 1]]):
            sel = pairs[(sizes[pairs[:, 0]] == n) & (sizes[pairs[:, 1]] == m)]
            if not len(sel):
                continue
            P = np.stack([verts[i] for i in sel[:, 0]])          # (k, n, 2)
            Q = np.stack([verts[j] for j in sel[:, 1]])          # (k, m, 2)
            a = P[:, :, None, :]
            e = (np.roll(P, -1, axis=1) - P)[:, :, None, :]
            c = Q[:, None, :, :] - a
            d = np.roll(Q, -1, axis=1)[:, None, :, :] - a
            L = np.hypot(e[..., 0], e[..., 1])
            cross_c = np.abs(e[..., 0] * c[..., 1] - e[..., 1] * c[..., 0]) / L
            cross_d = np.abs(e[..., 0] * d[..., 1] - e[..., 1] * d[..., 0]) / L
            tc = (c * e).sum(-1) / L
            td = (d * e).sum(-1) / L
            overlap = np.minimum(np.maximum(tc, td), L) - np.maximum(np.minimum(tc, td), 0.0)
            hit = (cross_c < tol) & (cross_d < tol) & (overlap > tol)    # (k, n, m)
            for row in np.argwhere(hit.reshape(len(sel), -1).any(axis=1)).ravel():
                ei, ej = np.unravel_index(np.argmax(hit[row]), hit[row].shape)
                out.append((int(sel[row, 0]), int(sel[row, 1]), int(ei), int(ej)))
    out.sort()
    return out


def _float_pose(rec):
    return complex(float(rec[1]), float(rec[2])), bool(rec[3]), complex(float(rec[4]), float(rec[5]))


def _float_relative(ga, gb):
    """``ga^-1 gb`` for float poses ``(u, reflect, t)``."""
    ua, fa, ta = ga
    ub, fb, tb = gb
    # ga^-1(z) = conj-or-not((z - ta) / ua)
    u = ub / ua
    t = (tb - ta) / ua
    if fa:
        u, t = u.conjugate(), t.conjugate()
    return u, fa != fb, t


def _float_sym(g):
    return complex(float(g.rot.u.x), float(g.rot.u.y)), g.rot.reflect, \
        complex(float(g.trans.x), float(g.trans.y))


def _float_compose(g, h):
    ug, fg, tg = g
    uh, fh, th = h
    if fg:
        uh, th = uh.conjugate(), th.conjugate()
    return ug * uh, fg != fh, ug * th + tg


def _rounded(g, digits=6):
    u, f, t = g
    r = lambda v: round(v, digits) + 0.0
    return (r(u.real), r(u.imag), f, r(t.real), r(t.imag))


def _canonical(tiles, syms, a, b):
    best = None
    for x, y in ((a, b), (b, a)):
        ga_inv = tiles[x].pose.inverse()
        gb = tiles[y].pose
        for sa in syms[tiles[x].type]:
            left = sa.inverse() @ ga_inv
            for sb in syms[tiles[y].type]:
                rel = left @ gb @ sb
                key = (tiles[x].type, tiles[y].type) + _pose_key(rel)
                if best is None or key < best[0]:
                    best = (key, rel)
    return best


def adjacency_census(patch, rule):
    """Distinct edge-to-edge neighbour configurations with multiplicities.

    Each touching pair is reduced to ``(type_a, type_b, g_a^-1 g_b)``,
    minimised over the two orderings and the prototiles' symmetry groups,
    so congruent configurations compare equal.  Contacts are confirmed with
    exact predicates on exact patches; pairs are bucketed by a rounded float
    form of the canonical pose and each bucket's exact canonical pose is
    computed from its first member.
    """
    if len(patch) < 2:
        return []
    verts = patch.float_vertices(rule)
    tiles = patch.tiles
    recs = patch.records
    syms = [prototile_symmetries(p.shape) for p in rule.prototiles]
    fsyms = [[_float_sym(s) for s in ss] for ss in syms]
    fsyms_inv = [[_float_sym(s.inverse()) for s in ss] for ss in syms]
    polys = {}

    def poly(i):
        if i not in polys:
            polys[i] = tiles[i].polygon(rule).vertices
        return polys[i]

    buckets = Counter()
    first = {}
    for i, j, ei, ej in _candidate_edges(verts):
        P, Q = poly(i), poly(j)
        if not _segment_overlap(P[ei], P[(ei + 1) % len(P)], Q[ej], Q[(ej + 1) % len(Q)]):
            continue
        best = None
        for x, y in ((i, j), (j, i)):
            rel = _float_relative(_float_pose(recs[x]), _float_pose(recs[y]))
            tx, ty = recs[x][0], recs[y][0]
            for sa in fsyms_inv[tx]:
                left = _float_compose(sa, rel)
                for sb in fsyms[ty]:
                    key = (tx, ty) + _rounded(_float_compose(left, sb))
                    if best is None or key < best:
                        best = key
        buckets[best] += 1
        first.setdefault(best, (i, j))
    exact = Counter()
    reps = {}
    for fkey, n in buckets.items():
        key, rel = _canonical(tiles, syms, *first[fkey])
        exact[key] += n
        reps.setdefault(key, rel)
    return [AdjacencyConfiguration(key[0], key[1], reps[key], n)
            for key, n in sorted(exact.items(), key=lambda kv: _sort_key(kv[0]))]


def _sort_key(key):
    return tuple(float(v) if not isinstance(v, (bool, int)) else v for v in key)

"""Inflation of tiles and patches, patch I/O, and the surface-to-volume ratio.

Patches live in an expanding frame: every inflation step multiplies the
whole patch by the similarity ``sigma = expansion / lam`` (|sigma| = 1/lam)
instead of shrinking the children.  Tiles therefore stay congruent to their
prototiles, and ``F^r(P)`` is represented up to one global similarity.  For
the pinwheel builtin ``sigma = 2 - i`` and all coordinates are Gaussian
rationals.

Internally a tile is the flat record ``(type, ux, uy, reflect, tx, ty)``
for the pose ``z -> u*z + t`` (``u*conj(z) + t`` when reflected).  Sorting
records gives the canonical tile order.
"""

import json
import math
import os
from math import lcm
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from gmpy2 import mpq

from .errors import PatchTooLarge, UnknownTileType
from .geom import numbers as nb
from .geom.plane import Isometry, Point, UnitRotation, rotation_gk
from .geom.polygon import Polygon, clip_convex, shoelace, triangulate

DEFAULT_CAP = 5_000_000
PATCH_SCHEMA = "tessella.patch/1"


def default_cap():
    env = os.environ.get("TESSELLA_CAP")
    return int(env) if env else DEFAULT_CAP


@dataclass(frozen=True)
class Tile:
    type: int
    pose: Isometry
    gen_scale: int = 0

    def polygon(self, rule):
        return rule.prototiles[self.type].shape.transformed(self.pose)

    def record(self):
        u, t = self.pose.rot.u, self.pose.trans
        return (self.type, u.x, u.y, self.pose.reflect, t.x, t.y)


def _tile_from_record(rec, scale):
    typ, ux, uy, refl, tx, ty = rec
    rot = UnitRotation.__new__(UnitRotation)
    rot.u = Point(ux, uy)
    rot.reflect = refl
    return Tile(typ, Isometry(rot, Point(tx, ty)), scale)


class Patch:
    """Finite interior-disjoint tile collection in canonical order.

    Records may be held as integers over one common denominator (the fast
    path for rules whose constants are all rational); they are turned into
    exact rationals on first access to :attr:`records`.
    """

    def __init__(self, records, scale=0, seed_type=None, r=0, rule_hash=None,
                 expansion=None, radicand=1, lam=None, presorted=False, denominator=None):
        if denominator is None:
            self._records = records if presorted else sorted(records)
            self._raw = None
        else:
            self._records = None
            self._raw = records if presorted else sorted(records)
        self._den = denominator
        self.scale = scale
        self.seed_type = seed_type
        self.r = r
        self.rule_hash = rule_hash
        self.expansion = expansion
        self.radicand = radicand
        self.lam = lam
        self._tiles = None

    @property
    def records(self):
        if self._records is None:
            d = mpq(1, self._den)
            self._records = [(a, b * d, c * d, e, f * d, g * d) for a, b, c, e, f, g in self._raw]
        return self._records

    @classmethod
    def seed(cls, rule, type_id, pose=None):
        if not 0 <= type_id < rule.size:
            raise UnknownTileType(f"tile type {type_id} not in 0..{rule.size - 1}")
        pose = pose or Isometry.identity(rule.exact)
        tile = Tile(type_id, pose, 0)
        return cls([tile.record()], 0, type_id, 0, rule.hash(), rule.expansion, rule.radicand,
                   rule.lam)

    @classmethod
    def from_tiles(cls, rule, tiles, scale=0, seed_type=None, r=0):
        return cls([t.record() for t in tiles], scale, seed_type, r, rule.hash(), rule.expansion,
                   rule.radicand, rule.lam)

    @property
    def exact(self):
        if self._raw is not None:
            return True
        return not self._records or not isinstance(self._records[0][1], float)

    @property
    def tiles(self):
        if self._tiles is None:
            self._tiles = [_tile_from_record(rec, self.scale) for rec in self.records]
        return self._tiles

    def __len__(self):
        return len(self._raw if self._records is None else self._records)

    def __iter__(self):
        return iter(self.tiles)

    def __eq__(self, other):
        if not isinstance(other, Patch) or self.scale != other.scale or len(self) != len(other):
            return False
        if self._raw is not None and other._raw is not None and self._den == other._den:
            return self._raw == other._raw
        return self.records == other.records

    def type_counts(self, n):
        counts = [0] * n
        for rec in (self._raw if self._records is None else self._records):
            counts[rec[0]] += 1
        return counts

    def polygons(self, rule):
        return [t.polygon(rule) for t in self.tiles]

    def transformed(self, g):
        """Image of the patch under an isometry (same scale)."""
        tiles = [Tile(t.type, g @ t.pose, t.gen_scale) for t in self.tiles]
        return Patch([t.record() for t in tiles], self.scale, self.seed_type, self.r,
                     self.rule_hash, self.expansion, self.radicand, self.lam)

    def float_vertices(self, rule):
        """Per-tile float vertex arrays (ccw), in canonical order."""
        shapes = [np.array([complex(v) for v in p.shape.vertices]) for p in rule.prototiles]
        recs = self.records
        types = np.fromiter((r[0] for r in recs), dtype=np.int64, count=len(recs))
        u = np.array([complex(float(r[1]), float(r[2])) for r in recs])
        t = np.array([complex(float(r[4]), float(r[5])) for r in recs])
        refl = np.fromiter((r[3] for r in recs), dtype=bool, count=len(recs))
        out = [None] * len(recs)
        for j, shp in enumerate(shapes):
            idx = np.nonzero(types == j)[0]
            if not len(idx):
                continue
            z = np.where(refl[idx, None], np.conj(shp)[None, :], shp[None, :])
            w = u[idx, None] * z + t[idx, None]
            w = np.where(refl[idx, None], w[:, ::-1], w)
            arr = np.stack([w.real, w.imag], axis=-1)
            for n, i in enumerate(idx):
                out[i] = arr[n]
        return out

    def angles(self):
        """Pose rotation angles in the unexpanded frame (global sigma^scale removed)."""
        shift = self.scale * self.expansion.angle() if self.expansion is not None else 0.0
        return np.array([math.atan2(float(r[2]), float(r[1])) for r in self.records]) - shift

    def reflect_flags(self):
        return np.array([r[3] for r in self.records], dtype=bool)


# -- inflation ----------------------------------------------------------------

def _constants(rule):
    """Per (type, parent-reflect) child tables and the expansion factor."""
    omega = rule.expansion.u
    sigma = rule.sigma
    table = []
    for j in range(rule.size):
        per_flag = []
        for flag in (False, True):
            row = []
            for c in rule.children[j]:
                cu = c.pose.rot.u.conj() if flag else c.pose.rot.u
                ct = c.pose.trans.conj() if flag else c.pose.trans
                rho = omega * cu
                tau = sigma * ct
                row.append((c.type, rho.x, rho.y, tau.x, tau.y, c.pose.reflect))
            per_flag.append(tuple(row))
        table.append(tuple(per_flag))
    return tuple(table), sigma.x, sigma.y


def _step(records, table, sx, sy):
    out = []
    app = out.append
    for typ, ux, uy, refl, tx, ty in records:
        stx = sx * tx - sy * ty
        sty = sx * ty + sy * tx
        for ct, rx, ry, px, py, cr in table[typ][refl]:
            app((ct, ux * rx - uy * ry, ux * ry + uy * rx, refl ^ cr,
                 ux * px - uy * py + stx, ux * py + uy * px + sty))
    return out


def _run(records, table, sx, sy, r):
    for _ in range(r):
        records = _step(records, table, sx, sy)
    return records


def substitution_counts(rule):
    """Integer matrix ``A[j][k]`` = number of type-j children of prototile k."""
    n = rule.size
    A = [[0] * n for _ in range(n)]
    for k in range(n):
        for c in rule.children[k]:
            A[c.type][k] += 1
    return A


def projected_size(rule, counts, r):
    A = substitution_counts(rule)
    v = list(counts)
    for _ in range(r):
        v = [sum(A[j][k] * v[k] for k in range(len(v))) for j in range(len(v))]
    return sum(v)


def inflate_tile(rule, tile):
    """Children of one tile in the next (expanded) frame, canonically ordered."""
    if not 0 <= tile.type < rule.size:
        raise UnknownTileType(f"tile type {tile.type} not in 0..{rule.size - 1}")
    table, sx, sy = _constants(rule)
    recs = sorted(_step([tile.record()], table, sx, sy))
    return [_tile_from_record(rec, tile.gen_scale + 1) for rec in recs]


def _integer_tables(table, sx, sy):
    """Integer version of the child tables, or None if a constant is irrational."""
    consts = [sx, sy] + [v for per in table for row in per for c in row for v in c[1:5]]
    if any(isinstance(v, (nb.Surd, float)) for v in consts):
        return None
    den = 1
    for v in consts:
        den = lcm(den, int(mpq(v).denominator))
    itable = tuple(tuple(tuple((ct, int(rx * den), int(ry * den), int(px * den), int(py * den), cr)
                               for ct, rx, ry, px, py, cr in row) for row in per) for per in table)
    return itable, int(sx * den), int(sy * den), den


def _integer_records(records):
    """Records scaled to integers by their common denominator, or None."""
    den = 1
    for rec in records:
        for v in (rec[1], rec[2], rec[4], rec[5]):
            if isinstance(v, (nb.Surd, float)):
                return None
            den = lcm(den, int(mpq(v).denominator))
    return [(a, int(b * den), int(c * den), e, int(f * den), int(g * den))
            for a, b, c, e, f, g in records], den


def _parallel(records, fn, r, workers, step):
    pre = 0
    while len(records) < 4 * workers and pre < r:
        records = step(records)
        pre += 1
    size = max(1, math.ceil(len(records) / workers))
    chunks = [records[i:i + size] for i in range(0, len(records), size)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(lambda ch: fn(ch, r - pre), chunks))
    return [rec for part in parts for rec in part]


def inflate_patch(rule, patch, r, cap=None, workers=1):
    """Apply the inflation function ``r`` times to every tile of ``patch``.

    Subtrees are independent, so with ``workers > 1`` the tiles are split
    into contiguous chunks, inflated on a thread pool, concatenated in chunk
    order and sorted; the result does not depend on ``workers``.
    """
    if r < 0:
        raise ValueError("r must be non-negative")
    cap = default_cap() if cap is None else cap
    projected = projected_size(rule, patch.type_counts(rule.size), r)
    if projected > cap:
        raise PatchTooLarge(projected, cap)
    table, sx, sy = _constants(rule)
    meta = (patch.scale + r, patch.seed_type, patch.r + r, patch.rule_hash, patch.expansion,
            patch.radicand, patch.lam)

    fast = _integer_tables(table, sx, sy)
    start = None
    if fast is not None:
        if patch._raw is not None:
            start = (patch._raw, patch._den)
        else:
            start = _integer_records(patch.records)
    if fast is not None and start is not None:
        itable, isx, isy, den = fast
        records, den0 = start

        def fn(recs, n):
            return _run(recs, itable, isx, isy, n)
        if workers > 1 and r > 0:
            records = _parallel(records, fn, r, workers, lambda rs: _step(rs, itable, isx, isy))
        else:
            records = fn(records, r)
        records.sort()
        return Patch(records, *meta, presorted=True, denominator=den0 * den ** r)

    def fn(recs, n):
        return _run(recs, table, sx, sy, n)
    records = patch.records
    if workers > 1 and r > 0:
        records = _parallel(records, fn, r, workers, lambda rs: _step(rs, table, sx, sy))
    else:
        records = fn(records, r)
    records.sort()
    return Patch(records, *meta, presorted=True)


def iterate(rule, seed_type, r, cap=None, workers=1):
    """``F^r(P_seed)`` starting from the prototile in its defining pose."""
    return inflate_patch(rule, Patch.seed(rule, seed_type), r, cap=cap, workers=workers)


def support_polygon(rule, patch):
    """The region covered by ``F^r(P)``: the seed prototile scaled by ``sigma^r``."""
    shape = rule.prototiles[patch.seed_type].shape
    sig = rule.sigma
    factor = Point(1, 0) if rule.exact else Point(1.0, 0.0)
    for _ in range(patch.r):
        factor = factor * sig
    return Polygon([v * factor for v in shape.vertices], check=False)


# -- patch I/O ----------------------------------------------------------------

def _num(x):
    return x if isinstance(x, float) else nb.to_text(x)


def patch_to_dict(patch):
    lam = patch.lam
    tiles = []
    for typ, ux, uy, refl, tx, ty in patch.records:
        u = Point(ux, uy)
        if isinstance(ux, float) or lam is None:
            g, k = u, 0
        else:
            g, k = rotation_gk(u, lam, max_k=2)
        tiles.append({"type": typ, "rot": {"g_re": _num(g.x), "g_im": _num(g.y), "k": k},
                      "reflect": bool(refl), "trans": {"x": _num(tx), "y": _num(ty)}})
    out = {
        "schema": PATCH_SCHEMA,
        "rule_hash": patch.rule_hash,
        "seed_type": patch.seed_type,
        "r": patch.r,
        "scale_exponent": patch.scale,
        "radicand": patch.radicand,
        "lambda": None if lam is None else _num(lam),
        "tiles": tiles,
    }
    if patch.expansion is not None:
        e = patch.expansion.u
        out["frame_rotation"] = {"re": _num(e.x), "im": _num(e.y)}
    return out


def dump_patch(patch, fh):
    json.dump(patch_to_dict(patch), fh, separators=(",", ":"))
    fh.write("\n")


def patch_from_dict(data):
    d = data.get("radicand", 1)
    exact = not any(isinstance(t["trans"]["x"], float) for t in data["tiles"][:1])

    def num(v):
        if isinstance(v, (float, int)) and not isinstance(v, bool) and not exact:
            return float(v)
        return nb.from_text(v, d)

    lam = None if data.get("lambda") is None else num(data["lambda"])
    recs = []
    for t in data["tiles"]:
        rot = t["rot"]
        u = Point(num(rot["g_re"]), num(rot["g_im"]))
        k = rot.get("k", 0)
        if k:
            u = u * (lam ** k)
        if exact and u.norm2() != 1:
            raise ValueError(f"tile rotation {u} is not a unit")
        recs.append((int(t["type"]), u.x, u.y, bool(t.get("reflect", False)),
                     num(t["trans"]["x"]), num(t["trans"]["y"])))
    expansion = None
    if "frame_rotation" in data:
        fr = data["frame_rotation"]
        expansion = UnitRotation(Point(num(fr["re"]), num(fr["im"])))
    return Patch(recs, data.get("scale_exponent", 0), data.get("seed_type"), data.get("r", 0),
                 data.get("rule_hash"), expansion, d, lam)


def load_patch(fh):
    return patch_from_dict(json.load(fh))


# -- surface-to-volume ratio -----------------------------------------------------

@dataclass
class BoundaryRatioReport:
    t: float
    ratio: object
    method: str
    stderr: float = 0.0
    seed: int = None
    samples: int = 0


def _unit_edge_normal_offsets(P):
    """Exact inward unit-offset lines, or None if an edge length leaves the field."""
    lines = []
    d = nb.radicand_of(*(c for v in P.vertices for c in v))
    if d == 1:
        parts = {nb.squarefree_part(e.norm2()) for e in (b - a for a, b in P.edges())}
        parts.discard(1)
        if len(parts) > 1:
            return None
        d = parts.pop() if parts else 1
    for a, b in P.edges():
        e = b - a
        L = nb.exact_sqrt(e.norm2(), d)
        if L is None:
            return None
        n = Point(-e.y, e.x) / L            # inward normal for a ccw polygon
        lines.append((a + n, b + n))
    return lines


def _inset(P, lines):
    pts = list(P.vertices)
    for a, b in lines:
        big = [a + (a - b) * 1000, b + (b - a) * 1000]
        e = big[1] - big[0]
        n = Point(-e.y, e.x)
        half = [big[0], big[1], big[1] + n * 1000, big[0] + n * 1000]
        pts = clip_convex(pts, half)
        if len(pts) < 3:
            return []
    return pts


def boundary_ratio(P, t, samples=200_000, seed=12345):
    """Fraction of ``tP`` lying within distance 1 of its boundary.

    Convex polygons whose edge lengths lie in the coordinate field are
    handled exactly by offsetting every edge inward by 1 and clipping.
    Anything else is estimated by Monte Carlo with a fixed seed.
    """
    tP = P.scaled(t)
    if P.exact and not isinstance(t, float) and P.is_convex():
        lines = _unit_edge_normal_offsets(tP)
        if lines is not None:
            inner = _inset(tP, lines)
            inner_area = shoelace(inner) if len(inner) >= 3 else 0
            if inner_area and nb.sign(inner_area) < 0:
                inner_area = 0
            total = tP.area()
            return BoundaryRatioReport(float(t), (total - inner_area) / total, "exact")
    return _boundary_ratio_mc(tP.to_float(), float(t), samples, seed)


def _cross2(a, b):
    return a[0] * b[1] - a[1] * b[0]


def _boundary_ratio_mc(tP, t, samples, seed):
    rng = np.random.default_rng(seed)
    arr = tP.as_array()
    tris = [np.array([[float(v.x), float(v.y)] for v in tri]) for tri in triangulate(tP)]
    areas = np.array([abs(_cross2(tr[1] - tr[0], tr[2] - tr[0])) / 2 for tr in tris])
    pick = rng.choice(len(tris), size=samples, p=areas / areas.sum())
    r1, r2 = rng.random(samples), rng.random(samples)
    flip = r1 + r2 > 1
    r1[flip], r2[flip] = 1 - r1[flip], 1 - r2[flip]
    T = np.stack(tris)[pick]
    pts = T[:, 0] + r1[:, None] * (T[:, 1] - T[:, 0]) + r2[:, None] * (T[:, 2] - T[:, 0])
    dmin = np.full(samples, np.inf)
    n = len(arr)
    for i in range(n):
        a, b = arr[i], arr[(i + 1) % n]
        ab = b - a
        s = np.clip(((pts - a) @ ab) / (ab @ ab), 0, 1)
        dmin = np.minimum(dmin, np.hypot(*(pts - a - s[:, None] * ab).T))
    hit = (dmin <= 1.0).astype(float)
    p = hit.mean()
    return BoundaryRatioReport(t, float(p), "monte-carlo", float(np.sqrt(p * (1 - p) / samples)),
                               seed, samples)

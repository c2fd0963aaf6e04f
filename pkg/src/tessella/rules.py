"""Prototile sets and inflation rules: parsing, serialization, validation, builtins.

A child entry ``(type, pose)`` of prototile ``j`` places the shrunken
prototile ``P_type`` inside ``P_j`` through the similarity
``z -> lam * pose(z)``; ``pose`` is an isometry, so ``lam * rot`` is the
full linear part.
"""

import hashlib
import json
import logging
import math
from dataclasses import dataclass, field

from gmpy2 import mpq

from .errors import (LambdaOutOfRange, RuleSyntaxError, UnknownBuiltin, UnknownPrototile,
                     DegenerateGeometry)
from .geom import numbers as nb
from .geom.plane import Isometry, Point, UnitRotation, rotation_gk
from .geom.polygon import Polygon, contains, interiors_overlap, separated

log = logging.getLogger(__name__)

BUILTINS = ("square", "pinwheel")


@dataclass(frozen=True)
class Prototile:
    id: int
    name: str
    shape: Polygon


@dataclass(frozen=True)
class Child:
    type: int
    pose: Isometry


@dataclass
class InflationRule:
    prototiles: list
    lam: object
    children: list
    radicand: int = 1
    expansion: UnitRotation = None
    name: str = ""
    validated: bool = field(default=False, compare=False)

    def __post_init__(self):
        if self.expansion is None:
            self.expansion = UnitRotation.identity(self.exact)

    @property
    def exact(self):
        return not isinstance(self.lam, float)

    @property
    def size(self):
        return len(self.prototiles)

    @property
    def sigma(self):
        """Expanding similarity factor ``expansion / lam`` as a complex Point."""
        return self.expansion.u / self.lam

    def child_polygon(self, j, k):
        c = self.children[j][k]
        shape = self.prototiles[c.type].shape
        vs = [c.pose.rot.apply(v) * self.lam + c.pose.trans for v in shape.vertices]
        if c.pose.reflect:
            vs.reverse()
        return Polygon(vs, check=False)

    def has_reflections(self):
        return any(c.pose.reflect for kids in self.children for c in kids)

    def hash(self):
        text = json.dumps(serialize(self), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()[:16]

    def structurally_equal(self, other):
        return serialize(self) == serialize(other)


# -- validation ---------------------------------------------------------------

@dataclass
class PrototileStatus:
    id: int
    ok: bool
    kind: str = None          # None | "Overlap" | "Gap" | "OutOfBounds"
    pair: tuple = None
    witness_area: object = None
    message: str = ""


@dataclass
class RuleValidationReport:
    statuses: list

    @property
    def ok(self):
        return all(s.ok for s in self.statuses)

    @property
    def failure(self):
        for s in self.statuses:
            if not s.ok:
                return s
        return None

    def to_dict(self):
        return {
            "ok": self.ok,
            "prototiles": [
                {"id": s.id, "ok": s.ok, "kind": s.kind,
                 "pair": list(s.pair) if s.pair else None,
                 "witness_area": None if s.witness_area is None else _num_out(s.witness_area),
                 "message": s.message}
                for s in self.statuses
            ],
        }


def _num_out(x):
    return x if isinstance(x, float) else nb.to_text(x)


def _is_zero(x, scale=1.0):
    if isinstance(x, float):
        return abs(x) <= nb.get_tolerance() * max(1.0, scale)
    return nb.sign(x) == 0


def validate_rule(rule):
    """Check that each prototile is tiled exactly by its placed children.

    Containment of every child, pairwise interior-disjointness and the area
    identity together imply an exact cover.
    """
    statuses = []
    for j, proto in enumerate(rule.prototiles):
        parent = proto.shape
        kids = [rule.child_polygon(j, k) for k in range(len(rule.children[j]))]
        status = PrototileStatus(j, True)
        for k, q in enumerate(kids):
            if not contains(parent, q):
                status = PrototileStatus(j, False, "OutOfBounds", (k,),
                                         message=f"child {k} leaves prototile {j}")
                break
        if status.ok:
            for a in range(len(kids)):
                for b in range(a + 1, len(kids)):
                    p, q = kids[a], kids[b]
                    if p.is_convex() and q.is_convex() and separated(p, q):
                        continue
                    hit, area = interiors_overlap(p, q)
                    if hit:
                        status = PrototileStatus(j, False, "Overlap", (a, b), area,
                                                 f"children {a} and {b} overlap")
                        break
                if not status.ok:
                    break
        if status.ok:
            covered = sum((q.area() for q in kids[1:]), kids[0].area()) if kids else 0
            gap = parent.area() - covered
            if not _is_zero(gap, float(parent.area())):
                status = PrototileStatus(j, False, "Gap", None, gap,
                                         f"children of prototile {j} leave area {gap} uncovered")
        statuses.append(status)
    report = RuleValidationReport(statuses)
    rule.validated = report.ok
    return report


# -- serialization ------------------------------------------------------------

def _scalar_out(x):
    return x if isinstance(x, float) else nb.to_text(x)


def _point_out(p):
    return {"x": _scalar_out(p.x), "y": _scalar_out(p.y)}


def _rot_out(rot, lam):
    if not rot.exact:
        return {"g_re": float(rot.u.x), "g_im": float(rot.u.y), "k": 0}
    g, k = rotation_gk(rot.u, lam)
    return {"g_re": nb.to_text(g.x), "g_im": nb.to_text(g.y), "k": k}


def serialize(rule):
    """Rule as a JSON-ready dict."""
    lam = rule.lam
    out = {
        "name": rule.name,
        "radicand": rule.radicand,
        "lambda": _scalar_out(lam),
        "prototiles": [
            {"name": p.name, "vertices": [_point_out(v) for v in p.shape.vertices]}
            for p in rule.prototiles
        ],
        "children": [
            [{"type": c.type,
              "pose": {"rot": _rot_out(c.pose.rot, lam), "reflect": c.pose.reflect,
                       "trans": _point_out(c.pose.trans)}}
             for c in kids]
            for kids in rule.children
        ],
    }
    if not rule.expansion.is_identity():
        out["expansion"] = _rot_out(rule.expansion, lam)
    return out


def dumps(rule):
    return json.dumps(serialize(rule), indent=1)


class _Reader:
    def __init__(self, d, mode):
        self.d = d
        self.mode = mode

    def scalar(self, obj, where):
        try:
            if self.mode == "float":
                if isinstance(obj, (int, float)) and not isinstance(obj, bool):
                    return float(obj)
                return float(nb.from_text(obj, self.d))
            if isinstance(obj, float):
                raise ValueError("floating literal in exact mode")
            return nb.from_text(obj, self.d)
        except (ValueError, TypeError) as exc:
            raise RuleSyntaxError(f"{where}: {exc}") from None

    def point(self, obj, where):
        if isinstance(obj, dict):
            if set(obj) != {"x", "y"}:
                raise RuleSyntaxError(f"{where}: point needs keys x and y")
            return Point(self.scalar(obj["x"], where + ".x"), self.scalar(obj["y"], where + ".y"))
        if isinstance(obj, list) and len(obj) == 2:
            return Point(self.scalar(obj[0], where + "[0]"), self.scalar(obj[1], where + "[1]"))
        raise RuleSyntaxError(f"{where}: malformed point {obj!r}")

    def rot(self, obj, lam, reflect, where):
        if not isinstance(obj, dict) or not {"g_re", "g_im"} <= set(obj):
            raise RuleSyntaxError(f"{where}: rotation needs g_re, g_im and k")
        k = obj.get("k", 0)
        if not isinstance(k, int) or isinstance(k, bool) or k < 0:
            raise RuleSyntaxError(f"{where}: k must be a non-negative integer")
        g = Point(self.scalar(obj["g_re"], where + ".g_re"), self.scalar(obj["g_im"], where + ".g_im"))
        u = g * (lam ** k) if k else g
        return UnitRotation(u, reflect)


def _require(obj, key, kind, where):
    if not isinstance(obj, dict) or key not in obj:
        raise RuleSyntaxError(f"{where}: missing key {key!r}")
    val = obj[key]
    if kind is not None and not isinstance(val, kind):
        raise RuleSyntaxError(f"{where}.{key}: expected {kind.__name__}")
    return val


def parse_rule(text, mode="exact"):
    """Parse rule-file text into an (unvalidated) :class:`InflationRule`."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise RuleSyntaxError(exc.msg, exc.lineno, exc.colno) from None
    return rule_from_dict(data, mode)


def rule_from_dict(data, mode="exact"):
    if mode not in ("exact", "float"):
        raise ValueError(f"unknown mode {mode!r}")
    d = _require(data, "radicand", int, "$")
    nb.check_radicand(d)
    rd = _Reader(d, mode)
    lam = rd.scalar(_require(data, "lambda", None, "$"), "$.lambda")
    if not (nb.sign(lam) > 0 and nb.sign(lam - 1) < 0):
        raise LambdaOutOfRange(f"lambda must lie in (0, 1), got {lam}")

    protos_in = _require(data, "prototiles", list, "$")
    if not protos_in:
        raise RuleSyntaxError("$.prototiles: empty prototile set")
    prototiles = []
    for j, p in enumerate(protos_in):
        where = f"$.prototiles[{j}]"
        verts = _require(p, "vertices", list, where)
        pts = [rd.point(v, f"{where}.vertices[{i}]") for i, v in enumerate(verts)]
        try:
            shape = Polygon(pts)
        except DegenerateGeometry as exc:
            raise RuleSyntaxError(f"{where}: {exc}") from None
        prototiles.append(Prototile(j, str(p.get("name", f"P{j}")), shape))

    kids_in = _require(data, "children", list, "$")
    if len(kids_in) != len(prototiles):
        raise RuleSyntaxError(f"$.children: expected {len(prototiles)} lists, got {len(kids_in)}")
    children = []
    need_float = False
    for j, lst in enumerate(kids_in):
        if not isinstance(lst, list):
            raise RuleSyntaxError(f"$.children[{j}]: expected list")
        row = []
        for k, c in enumerate(lst):
            where = f"$.children[{j}][{k}]"
            t = _require(c, "type", int, where)
            if not 0 <= t < len(prototiles):
                raise UnknownPrototile(f"{where}: child type {t} but only {len(prototiles)} prototiles")
            pose = _require(c, "pose", dict, where)
            reflect = pose.get("reflect", False)
            if not isinstance(reflect, bool):
                raise RuleSyntaxError(f"{where}.pose.reflect: expected boolean")
            trans = rd.point(_require(pose, "trans", None, where + ".pose"), where + ".pose.trans")
            try:
                rot = rd.rot(_require(pose, "rot", dict, where + ".pose"), lam, reflect, where + ".pose.rot")
            except ValueError as exc:
                if mode == "exact" and _nearly_unit(exc, pose, rd, lam):
                    need_float = True
                    rot = None
                else:
                    raise RuleSyntaxError(f"{where}.pose.rot: {exc}") from None
            row.append((t, rot, trans, reflect, pose))
        children.append(row)

    expansion = None
    if "expansion" in data:
        try:
            expansion = rd.rot(data["expansion"], lam, False, "$.expansion")
        except ValueError as exc:
            raise RuleSyntaxError(f"$.expansion: {exc}") from None

    if need_float:
        log.warning("rule congruences leave Q(sqrt %d); falling back to approximate mode", d)
        return rule_from_dict(data, "float")

    rule = InflationRule(
        prototiles=prototiles,
        lam=lam,
        children=[[Child(t, Isometry(rot, trans)) for (t, rot, trans, _, _) in row] for row in children],
        radicand=d,
        expansion=expansion,
        name=str(data.get("name", "")),
    )
    return rule


def _nearly_unit(exc, pose, rd, lam):
    """A rotation that is not exactly unit but is within float tolerance."""
    try:
        frd = _Reader(rd.d, "float")
        rot = pose["rot"]
        g = complex(frd.scalar(rot["g_re"], ""), frd.scalar(rot["g_im"], ""))
        u = g * float(lam) ** rot.get("k", 0)
    except Exception:
        return False
    return abs(abs(u) - 1.0) <= 1e-6


def to_float_rule(rule):
    """Approximate-mode copy of an exact rule."""
    return rule_from_dict(_floatify(serialize(rule), rule.radicand), "float")


def _floatify(obj, d):
    if isinstance(obj, dict):
        if set(obj) <= {"rat", "irr"} and obj:
            return float(nb.from_text(obj, d))
        return {k: (v if k in ("k", "type", "reflect", "radicand", "name") else _floatify(v, d))
                for k, v in obj.items()}
    if isinstance(obj, list):
        return [_floatify(v, d) for v in obj]
    if isinstance(obj, str):
        return float(nb.rational(obj))
    return obj


def load_rule(path, mode="exact"):
    with open(path, encoding="utf-8") as fh:
        return parse_rule(fh.read(), mode)


# -- builtins -----------------------------------------------------------------

def _square():
    h = mpq(1, 2)
    shape = Polygon([(0, 0), (1, 0), (1, 1), (0, 1)])
    kids = [Child(0, Isometry.translation(Point(x, y))) for y in (0, h) for x in (0, h)]
    return InflationRule([Prototile(0, "square", shape)], h, [kids], radicand=1, name="square")


# Decomposition of the right triangle (0,0),(2,0),(2,1) drawn in the frame
# expanded by sigma = 2 - i, where the parent becomes (0, 4-2i, 5) and every
# child is a unit copy with integer corners: (type, rotation, translation).
_PINWHEEL_EXPANDED = [
    (1, (1, 0), (0, 0)),
    (1, (1, 0), (2, -1)),
    (0, (-1, 0), (4, 0)),
    (0, (1, 0), (2, -1)),
    (1, (0, 1), (4, -2)),
]


def _pinwheel():
    d = 5
    lam = nb.surd(0, mpq(1, 5), d)                     # 1/sqrt(5)
    omega = Point(2, -1) * lam                          # (2 - i)/sqrt(5)
    sigma = Point(2, -1)
    right = Polygon([(0, 0), (2, 0), (2, 1)])
    left = Polygon([(0, 0), (2, -1), (2, 0)])           # mirror image in the x-axis
    kids0, kids1 = [], []
    for t, u, tr in _PINWHEEL_EXPANDED:
        rot = Point(*u) / omega
        trans = Point(*tr) / sigma
        kids0.append(Child(t, Isometry(UnitRotation(rot), trans)))
        kids1.append(Child(1 - t, Isometry(UnitRotation(rot.conj()), trans.conj())))
    return InflationRule([Prototile(0, "right", right), Prototile(1, "left", left)], lam,
                         [kids0, kids1], radicand=d, expansion=UnitRotation(omega), name="pinwheel")


def builtin(name):
    """A validated builtin rule: ``"square"`` or ``"pinwheel"``."""
    makers = {"square": _square, "pinwheel": _pinwheel}
    if name not in makers:
        raise UnknownBuiltin(f"unknown builtin rule {name!r}; choose from {', '.join(BUILTINS)}")
    rule = makers[name]()
    report = validate_rule(rule)
    assert report.ok, report
    return rule


def area_identity_holds(rule):
    """``sum_k lam^2 area(P_{n_k}) == area(P_j)`` for every prototile."""
    lam2 = rule.lam * rule.lam
    for j, proto in enumerate(rule.prototiles):
        total = 0
        for c in rule.children[j]:
            total = total + lam2 * rule.prototiles[c.type].shape.area()
        if not _is_zero(total - proto.shape.area(), float(proto.shape.area())):
            return False
    return True


def prototile_symmetries(shape):
    """Isometries mapping ``shape`` onto itself (direct and indirect)."""
    vs = shape.vertices
    n = len(vs)
    out = []
    for reflect in (False, True):
        for s in range(n):
            # map vs[0] -> vs[s], vs[1] -> vs[s +- 1]
            tgt0 = vs[s]
            tgt1 = vs[(s - 1) % n] if reflect else vs[(s + 1) % n]
            src = vs[1] - vs[0]
            dst = tgt1 - tgt0
            if src.exact:
                if src.norm2() != dst.norm2():
                    continue
            elif not math.isclose(float(src.norm2()), float(dst.norm2()), abs_tol=1e-9):
                continue
            if reflect:
                u = dst / src.conj()
            else:
                u = dst / src
            try:
                rot = UnitRotation(u, reflect)
            except ValueError:
                continue
            g = Isometry(rot, tgt0 - rot.apply(vs[0]))
            if shape.transformed(g) == shape:
                out.append(g)
    return out

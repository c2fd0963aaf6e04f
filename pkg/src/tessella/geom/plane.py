"""Points, unit rotations and plane isometries.

The plane is identified with C.  A direct isometry is ``z -> u*z + t`` and
an indirect one is ``z -> u*conj(z) + t`` with ``|u| = 1``.
"""

import cmath
import math

from gmpy2 import mpq

from ..errors import ModeMismatch, NotARotation
from . import numbers as nb


def _coerce(v):
    if isinstance(v, float):
        return v
    if isinstance(v, (nb.Surd,)):
        return v
    return mpq(v)


class Point:
    """A point of the plane, doubling as a complex number."""

    __slots__ = ("x", "y")

    def __init__(self, x, y):
        x = _coerce(x)
        y = _coerce(y)
        if isinstance(x, float) != isinstance(y, float):
            raise ModeMismatch("point components must share one mode")
        self.x = x
        self.y = y

    @property
    def exact(self):
        return not isinstance(self.x, float)

    @classmethod
    def from_complex(cls, z):
        return cls(float(z.real), float(z.imag))

    def _check(self, other):
        if self.exact != other.exact:
            raise ModeMismatch("exact and approximate points mixed")

    def __add__(self, other):
        self._check(other)
        return Point(self.x + other.x, self.y + other.y)

    def __sub__(self, other):
        self._check(other)
        return Point(self.x - other.x, self.y - other.y)

    def __neg__(self):
        return Point(-self.x, -self.y)

    def __mul__(self, other):
        if isinstance(other, Point):
            self._check(other)
            return Point(self.x * other.x - self.y * other.y,
                         self.x * other.y + self.y * other.x)
        return Point(self.x * other, self.y * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Point):
            return (self * other.conj()) / other.norm2()
        return Point(self.x / other, self.y / other)

    def conj(self):
        return Point(self.x, -self.y)

    def norm2(self):
        return self.x * self.x + self.y * self.y

    def dot(self, other):
        return self.x * other.x + self.y * other.y

    def cross(self, other):
        return self.x * other.y - self.y * other.x

    def __complex__(self):
        return complex(float(self.x), float(self.y))

    def to_float(self):
        return Point(float(self.x), float(self.y))

    def key(self):
        return (self.x, self.y)

    def __eq__(self, other):
        return isinstance(other, Point) and self.x == other.x and self.y == other.y

    def __hash__(self):
        return hash((self.x, self.y))

    def __iter__(self):
        yield self.x
        yield self.y

    def __repr__(self):
        return f"Point({self.x}, {self.y})"


def close(p, q, eps=None):
    """Point equality: structural when exact, within tolerance otherwise."""
    if p.exact and q.exact:
        return p == q
    eps = nb.get_tolerance() if eps is None else eps
    return abs(complex(p) - complex(q)) <= eps


ORIGIN = Point(0, 0)
ONE = Point(1, 0)


class UnitRotation:
    """Linear part of an isometry: ``z -> u*z`` or ``z -> u*conj(z)``.

    ``u`` is stored as a Point with ``|u|^2 = 1`` checked at construction.
    """

    __slots__ = ("u", "reflect")

    def __init__(self, u, reflect=False):
        if not isinstance(u, Point):
            u = Point(*u)
        n = u.norm2()
        if u.exact:
            if n != 1:
                raise ValueError(f"rotation {u} is not a unit: |u|^2 = {n}")
        elif abs(n - 1.0) > 4 * nb.get_tolerance():
            raise ValueError(f"rotation {u} is not a unit: |u|^2 = {n}")
        self.u = u
        self.reflect = bool(reflect)

    @classmethod
    def identity(cls, exact=True):
        return cls(ONE if exact else Point(1.0, 0.0))

    @classmethod
    def from_angle(cls, theta, reflect=False):
        return cls(Point(math.cos(theta), math.sin(theta)), reflect)

    @classmethod
    def from_gk(cls, g, k, base, reflect=False):
        """``u = g * base**k`` where ``base`` is the rule's dilation factor."""
        scale = base ** k if k else mpq(1)
        return cls(g * scale, reflect)

    @property
    def exact(self):
        return self.u.exact

    def apply(self, z):
        return self.u * (z.conj() if self.reflect else z)

    def __mul__(self, other):
        """Composition ``self o other``."""
        v = other.u.conj() if self.reflect else other.u
        return UnitRotation(self.u * v, self.reflect != other.reflect)

    def inverse(self):
        if self.reflect:
            return self
        return UnitRotation(self.u.conj())

    def angle(self):
        return math.atan2(float(self.u.y), float(self.u.x))

    def __pow__(self, n):
        if self.reflect:
            raise NotARotation("powers of a reflection are not tracked")
        result = UnitRotation.identity(self.exact)
        base = self if n >= 0 else self.inverse()
        for _ in range(abs(n)):
            result = result * base
        return result

    def is_identity(self):
        return not self.reflect and close(self.u, ONE if self.exact else Point(1.0, 0.0))

    def __eq__(self, other):
        return isinstance(other, UnitRotation) and self.u == other.u and self.reflect == other.reflect

    def __hash__(self):
        return hash((self.u, self.reflect))

    def __repr__(self):
        r = ", reflect" if self.reflect else ""
        return f"UnitRotation({self.u.x}, {self.u.y}{r})"


def rotation_gk(u, base, max_k=8):
    """Write a unit complex ``u`` as ``g * base**k`` with ``k`` minimal.

    The minimal ``k`` is the first one for which ``g`` has rational
    components; if none does up to ``max_k`` the result uses ``k = 0``.
    """
    g = u
    inv = 1 / base
    for k in range(max_k + 1):
        if not isinstance(g.x, nb.Surd) and not isinstance(g.y, nb.Surd):
            return g, k
        g = g * inv
    return u, 0


class Isometry:
    """Plane congruence ``z -> rot(z) + trans``."""

    __slots__ = ("rot", "trans")

    def __init__(self, rot, trans):
        if rot.exact != trans.exact:
            raise ModeMismatch("isometry mixes exact and approximate parts")
        self.rot = rot
        self.trans = trans

    @classmethod
    def identity(cls, exact=True):
        return cls(UnitRotation.identity(exact), ORIGIN if exact else Point(0.0, 0.0))

    @classmethod
    def translation(cls, t):
        return cls(UnitRotation.identity(t.exact), t)

    @classmethod
    def rotation(cls, u, center=None):
        rot = u if isinstance(u, UnitRotation) else UnitRotation(u)
        if center is None:
            return cls(rot, ORIGIN if rot.exact else Point(0.0, 0.0))
        return cls(rot, center - rot.apply(center))

    @property
    def exact(self):
        return self.rot.exact

    @property
    def reflect(self):
        return self.rot.reflect

    def __call__(self, z):
        return self.rot.apply(z) + self.trans

    def __matmul__(self, other):
        return compose(self, other)

    def inverse(self):
        inv = self.rot.inverse()
        return Isometry(inv, -inv.apply(self.trans))

    def __eq__(self, other):
        return isinstance(other, Isometry) and self.rot == other.rot and self.trans == other.trans

    def __hash__(self):
        return hash((self.rot, self.trans))

    def close_to(self, other, eps=None):
        return (self.rot.reflect == other.rot.reflect and close(self.rot.u, other.rot.u, eps)
                and close(self.trans, other.trans, eps))

    def __repr__(self):
        return f"Isometry({self.rot!r}, {self.trans!r})"


def compose(g, h):
    """``g o h``: apply ``h`` first."""
    if g.exact != h.exact:
        raise ModeMismatch("cannot compose exact and approximate isometries")
    return Isometry(g.rot * h.rot, g.rot.apply(h.trans) + g.trans)


def angle_of(u):
    return cmath.phase(complex(u))

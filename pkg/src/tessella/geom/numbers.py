"""Exact reals in Q(sqrt d) and the shared float tolerance.

Exact values are either ``gmpy2.mpq`` (rational) or :class:`Surd`
(``a + b*sqrt(d)`` with ``b != 0``).  Keeping rationals as bare ``mpq``
makes the common case fast and keeps equality structural: a value has
exactly one representation.  Approximate values are plain floats compared
with the module tolerance.
"""

import contextlib
import math
import re
from fractions import Fraction

import gmpy2
from gmpy2 import mpq

from ..errors import ModeMismatch, UnsupportedRadicand

_tolerance = 1e-9

_RATIONAL_RE = re.compile(r"^\s*[+-]?\d+(\s*/\s*\d+)?\s*$")


def get_tolerance():
    return _tolerance


def set_tolerance(eps):
    global _tolerance
    if not eps > 0:
        raise ValueError("tolerance must be positive")
    _tolerance = float(eps)


@contextlib.contextmanager
def tolerance(eps):
    """Temporarily change the approximate-mode tolerance."""
    old = _tolerance
    set_tolerance(eps)
    try:
        yield
    finally:
        set_tolerance(old)


def is_squarefree(d):
    if d < 1:
        return False
    k = 2
    while k * k <= d:
        if d % (k * k) == 0:
            return False
        k += 1
    return True


def check_radicand(d):
    if not isinstance(d, int) or isinstance(d, bool) or not is_squarefree(d):
        raise UnsupportedRadicand(f"radicand must be a square-free positive integer, got {d!r}")
    return d


class Surd:
    """``a + b*sqrt(d)`` with rational ``a, b``, ``b != 0`` and square-free ``d > 1``.

    Construct through :func:`surd`, which collapses to ``mpq`` when ``b == 0``.
    """

    __slots__ = ("a", "b", "d")

    def __init__(self, a, b, d):
        self.a = a
        self.b = b
        self.d = d

    # -- arithmetic -------------------------------------------------------
    def _parts(self, other):
        if isinstance(other, Surd):
            if other.d != self.d:
                raise ModeMismatch(f"sqrt({self.d}) and sqrt({other.d}) in one expression")
            return other.a, other.b
        if isinstance(other, float):
            raise ModeMismatch("exact value combined with a float")
        if isinstance(other, (int, Fraction)) or type(other) is type(_ZERO):
            return mpq(other), _ZERO
        return None

    def __add__(self, other):
        p = self._parts(other)
        if p is None:
            return NotImplemented
        return surd(self.a + p[0], self.b + p[1], self.d)

    __radd__ = __add__

    def __sub__(self, other):
        p = self._parts(other)
        if p is None:
            return NotImplemented
        return surd(self.a - p[0], self.b - p[1], self.d)

    def __rsub__(self, other):
        p = self._parts(other)
        if p is None:
            return NotImplemented
        return surd(p[0] - self.a, p[1] - self.b, self.d)

    def __mul__(self, other):
        p = self._parts(other)
        if p is None:
            return NotImplemented
        c, e = p
        if not e:
            return surd(self.a * c, self.b * c, self.d)
        return surd(self.a * c + self.b * e * self.d, self.a * e + self.b * c, self.d)

    __rmul__ = __mul__

    def inverse(self):
        n = self.a * self.a - self.b * self.b * self.d
        return Surd(self.a / n, -self.b / n, self.d)

    def __truediv__(self, other):
        p = self._parts(other)
        if p is None:
            return NotImplemented
        if not p[1]:
            return Surd(self.a / p[0], self.b / p[0], self.d)
        return self * Surd(p[0], p[1], self.d).inverse()

    def __rtruediv__(self, other):
        p = self._parts(other)
        if p is None:
            return NotImplemented
        return self.inverse() * surd(p[0], p[1], self.d)

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result, base = mpq(1), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __neg__(self):
        return Surd(-self.a, -self.b, self.d)

    def __pos__(self):
        return self

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def conjugate(self):
        """Real conjugate; field conjugation sqrt(d) -> -sqrt(d) is :meth:`galois`."""
        return self

    def galois(self):
        return Surd(self.a, -self.b, self.d)

    # -- order ------------------------------------------------------------
    def sign(self):
        sa, sb = _sgn(self.a), _sgn(self.b)
        if sa == 0 or sa == sb:
            return sb
        return sa if self.a * self.a > self.b * self.b * self.d else sb

    def _cmp(self, other):
        p = self._parts(other)
        if p is None:
            return None
        return sign(surd(self.a - p[0], self.b - p[1], self.d))

    def __lt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c < 0

    def __le__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c <= 0

    def __gt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c > 0

    def __ge__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c >= 0

    def __eq__(self, other):
        if isinstance(other, Surd):
            return self.a == other.a and self.b == other.b and self.d == other.d
        return False

    def __hash__(self):
        return hash((self.a, self.b, self.d))

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(self.d)

    def __bool__(self):
        return True

    def __repr__(self):
        return f"Surd({self.a}, {self.b}, {self.d})"

    def __str__(self):
        return f"{self.a} + {self.b}*sqrt({self.d})"

    def __reduce__(self):
        return (Surd, (self.a, self.b, self.d))


_ZERO = mpq(0)
_ONE = mpq(1)


def _sgn(q):
    return (q > 0) - (q < 0)


def surd(a, b=0, d=1):
    """Canonical exact value ``a + b*sqrt(d)``."""
    a = mpq(a)
    b = mpq(b)
    if not b:
        return a
    if d == 1:
        return a + b
    return Surd(a, b, d)


def rational(text):
    """Parse ``"a/b"`` or ``"a"`` as an exact rational; floats are refused."""
    if isinstance(text, bool):
        raise ValueError(f"not an exact rational: {text!r}")
    if isinstance(text, int):
        return mpq(text)
    if not isinstance(text, str) or not _RATIONAL_RE.match(text):
        raise ValueError(f"not an exact rational: {text!r}")
    num, _, den = text.replace(" ", "").partition("/")
    if den and int(den) == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return mpq(int(num), int(den) if den else 1)


def parts(x):
    """Return ``(a, b)`` with ``x = a + b*sqrt(d)``."""
    if isinstance(x, Surd):
        return x.a, x.b
    return mpq(x), _ZERO


def radicand_of(*values):
    """The common radicand of the given exact values (1 if all rational)."""
    d = 1
    for v in values:
        if isinstance(v, Surd):
            if d != 1 and v.d != d:
                raise ModeMismatch(f"sqrt({d}) and sqrt({v.d}) in one expression")
            d = v.d
    return d


def is_exact(x):
    return not isinstance(x, float)


def sign(x):
    """Sign of ``x``: exact for exact values, tolerance-snapped for floats."""
    if isinstance(x, float):
        if abs(x) <= _tolerance:
            return 0
        return 1 if x > 0 else -1
    if isinstance(x, Surd):
        return x.sign()
    return _sgn(x)


def to_float(x):
    return float(x)


def squarefree_part(q):
    """Square-free ``d`` with ``q = s^2 * d`` for a positive rational ``q`` (1 otherwise)."""
    if isinstance(q, Surd) or q <= 0:
        return 1
    n = int(mpq(q).numerator) * int(mpq(q).denominator)
    d, k = 1, 2
    while k * k <= n:
        while n % (k * k) == 0:
            n //= k * k
        if n % k == 0:
            d *= k
            n //= k
        k += 1
    return d * n


def _rational_sqrt(q):
    if q < 0:
        return None
    num, den = q.numerator, q.denominator
    if gmpy2.is_square(num) and gmpy2.is_square(den):
        return mpq(gmpy2.isqrt(num), gmpy2.isqrt(den))
    return None


def exact_sqrt(x, d=1):
    """Square root of a non-negative exact value inside Q(sqrt d), or ``None``."""
    if isinstance(x, float):
        raise ModeMismatch("exact_sqrt on a float")
    if sign(x) < 0:
        return None
    a, b = parts(x)
    if isinstance(x, Surd):
        d = x.d
    if not b:
        r = _rational_sqrt(a)
        if r is not None:
            return r
        if d > 1:
            r = _rational_sqrt(a / d)
            if r is not None:
                return surd(0, r, d)
        return None
    # (p + q sqrt d)^2 = a + b sqrt d  =>  p^2 = (a +- sqrt(a^2 - b^2 d)) / 2
    disc = _rational_sqrt(a * a - b * b * d)
    if disc is None:
        return None
    for p2 in ((a + disc) / 2, (a - disc) / 2):
        p = _rational_sqrt(p2)
        if p:
            q = b / (2 * p)
            cand = surd(p, q, d)
            if sign(cand) >= 0:
                return cand
            return -cand
        if p == 0 and p2 == 0:
            r = _rational_sqrt(a / d)
            if r is not None:
                return surd(0, r, d)
    return None


def to_text(x):
    """Exact value in rule-file encoding: ``"a/b"`` or ``{"rat": ..., "irr": ...}``."""
    if isinstance(x, float):
        raise ModeMismatch("float values have no exact encoding")
    if isinstance(x, Surd):
        return {"rat": str(x.a), "irr": str(x.b)}
    return str(mpq(x))


def from_text(obj, d=1):
    """Inverse of :func:`to_text`."""
    if isinstance(obj, dict):
        extra = set(obj) - {"rat", "irr"}
        if extra:
            raise ValueError(f"unexpected keys {sorted(extra)} in exact scalar")
        return surd(rational(obj.get("rat", "0")), rational(obj.get("irr", "0")), d)
    return rational(obj)

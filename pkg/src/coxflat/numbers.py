"""Scalar fields for the geometric representation.

Every entry ``-2 cos(pi/m)`` with ``m`` in {2, 3, 4, 6, inf} lies in the ring
Z[sqrt2, sqrt3], so roots of those groups have exact coordinates. Matrices that
only use {2, 3, inf} stay inside the plain integers. Any other label falls back
to mpmath interval arithmetic, where a sign decision on an interval straddling
zero is recorded as uncertified.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

from mpmath import iv


class Surd:
    """Exact number ``a + b*sqrt2 + c*sqrt3 + d*sqrt6`` with rational coefficients."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a=0, b=0, c=0, d=0):
        self.a = a
        self.b = b
        self.c = c
        self.d = d

    @staticmethod
    def _lift(x):
        if isinstance(x, Surd):
            return x
        if isinstance(x, (int, Fraction)):
            return Surd(x)
        return NotImplemented

    def coefficients(self) -> tuple:
        return (self.a, self.b, self.c, self.d)

    def __add__(self, other):
        o = Surd._lift(other)
        if o is NotImplemented:
            return o
        return Surd(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)

    __radd__ = __add__

    def __neg__(self):
        return Surd(-self.a, -self.b, -self.c, -self.d)

    def __sub__(self, other):
        o = Surd._lift(other)
        if o is NotImplemented:
            return o
        return Surd(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Surd(self.a * other, self.b * other, self.c * other, self.d * other)
        o = Surd._lift(other)
        if o is NotImplemented:
            return o
        a, b, c, d = self.a, self.b, self.c, self.d
        e, f, g, h = o.a, o.b, o.c, o.d
        return Surd(
            a * e + 2 * b * f + 3 * c * g + 6 * d * h,
            a * f + b * e + 3 * (c * h + d * g),
            a * g + c * e + 2 * (b * h + d * f),
            a * h + d * e + b * g + c * f,
        )

    __rmul__ = __mul__

    def _conj(self, flip2: bool, flip3: bool) -> "Surd":
        b = -self.b if flip2 else self.b
        c = -self.c if flip3 else self.c
        d = -self.d if flip2 != flip3 else self.d
        return Surd(self.a, b, c, d)

    def inverse(self) -> "Surd":
        if self.is_zero():
            raise ZeroDivisionError("Surd division by zero")
        partner = self._conj(True, False) * self._conj(False, True) * self._conj(True, True)
        norm = self * partner
        # norm is rational by Galois invariance
        assert norm.b == norm.c == norm.d == 0
        n = Fraction(norm.a)
        return Surd(*(Fraction(x) / n for x in partner.coefficients()))

    def __truediv__(self, other):
        o = Surd._lift(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return Surd._lift(other) * self.inverse()

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0 and self.c == 0 and self.d == 0

    def sign(self) -> int:
        return surd_sign(self.a, self.b, self.c, self.d)

    def __eq__(self, other):
        o = Surd._lift(other)
        if o is NotImplemented:
            return False
        return self.coefficients() == o.coefficients()

    def __hash__(self):
        if self.b == 0 and self.c == 0 and self.d == 0:
            return hash(self.a)
        return hash(self.coefficients())

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def __float__(self):
        return (float(self.a) + float(self.b) * math.sqrt(2)
                + float(self.c) * math.sqrt(3) + float(self.d) * math.sqrt(6))

    def is_rational(self) -> bool:
        return self.b == 0 and self.c == 0 and self.d == 0

    def __repr__(self):
        parts = []
        for coef, tag in zip(self.coefficients(), ("", "√2", "√3", "√6")):
            if coef:
                parts.append(f"{coef}{tag}")
        return "Surd(" + (" + ".join(parts) or "0") + ")"


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def _sign_sqrt2(u, v) -> int:
    """Sign of u + v*sqrt2 for rationals u, v."""
    su, sv = _sign(u), _sign(v)
    if sv == 0 or su == sv:
        return su
    if su == 0:
        return sv
    return su if u * u > 2 * v * v else sv


def surd_sign(a, b, c, d) -> int:
    """Exact sign of a + b*sqrt2 + c*sqrt3 + d*sqrt6."""
    # write as p + q*sqrt3 with p, q in Q(sqrt2)
    sp = _sign_sqrt2(a, b)
    sq = _sign_sqrt2(c, d)
    if sq == 0 or sp == sq:
        return sp
    if sp == 0:
        return sq
    # compare p^2 with 3 q^2 inside Q(sqrt2)
    diff = _sign_sqrt2(a * a + 2 * b * b - 3 * c * c - 6 * d * d, 2 * a * b - 6 * c * d)
    return sp if diff > 0 else sq


def to_rational(x) -> Fraction:
    """Return ``x`` as a Fraction; raise ValueError if it is irrational."""
    if isinstance(x, Surd):
        if not x.is_rational():
            raise ValueError(f"{x!r} is not rational")
        return Fraction(x.a)
    if isinstance(x, Rational):
        return Fraction(x)
    raise ValueError(f"{x!r} is not an exact rational")


class IntegerField:
    """Plain Python integers; enough for labels 2, 3 and inf."""

    exact = True
    name = "integer"

    def __init__(self):
        self.zero = 0
        self.one = 1

    def coupling(self, m) -> int:
        """``-2 cos(pi/m)``."""
        return {2: 0, 3: -1, math.inf: -2}[m]

    def representable(self, m) -> bool:
        return m in (2, 3, math.inf)

    def from_int(self, k: int):
        return k

    def sign(self, x) -> int:
        return _sign(x)

    decisive = sign

    def key(self, x):
        return x

    def div(self, x, y):
        q = Fraction(x) / Fraction(y)
        return q.numerator if q.denominator == 1 else q

    def to_float(self, x) -> float:
        return float(x)


class SurdField(IntegerField):
    """Exact arithmetic in Z[sqrt2, sqrt3] (rationals allowed after division)."""

    name = "surd"

    _COUPLING = {
        2: Surd(0),
        3: Surd(-1),
        4: Surd(0, -1),
        6: Surd(0, 0, -1),
        math.inf: Surd(-2),
    }

    def __init__(self):
        self.zero = Surd(0)
        self.one = Surd(1)

    def coupling(self, m) -> Surd:
        return self._COUPLING[m]

    def representable(self, m) -> bool:
        return m in self._COUPLING

    def from_int(self, k: int) -> Surd:
        return Surd(k)

    def sign(self, x) -> int:
        if isinstance(x, Surd):
            return x.sign()
        return _sign(x)

    decisive = sign

    def key(self, x):
        if isinstance(x, Surd):
            return x.coefficients()
        return (x, 0, 0, 0)

    def div(self, x, y):
        return Surd._lift(x) / Surd._lift(y)

    def to_float(self, x) -> float:
        return float(x)


class IntervalField:
    """mpmath interval arithmetic for labels without an exact carrier.

    ``sign`` returns 0 for an interval containing zero; when that interval is not
    the exact point 0 the decision is counted in ``ambiguous``.
    """

    exact = False
    name = "interval"

    def __init__(self, precision: int = 200):
        self.precision = precision
        self.ambiguous = 0
        self.zero = self._iv(0)
        self.one = self._iv(1)

    def _iv(self, x):
        iv.prec = self.precision
        return iv.mpf(x)

    def coupling(self, m):
        iv.prec = self.precision
        if m == math.inf:
            return iv.mpf(-2)
        if m == 2:
            return iv.mpf(0)
        if m == 3:
            return iv.mpf(-1)
        return -2 * iv.cos(iv.pi / m)

    def representable(self, m) -> bool:
        return True

    def from_int(self, k: int):
        return self._iv(k)

    def sign(self, x) -> int:
        if x.a > 0:
            return 1
        if x.b < 0:
            return -1
        if not (x.a == 0 and x.b == 0):
            self.ambiguous += 1
        return 0

    def decisive(self, x) -> int:
        """Sign when the interval excludes zero, else 0; never counted."""
        return 1 if x.a > 0 else (-1 if x.b < 0 else 0)

    def key(self, x):
        # midpoint rounded well inside the working precision
        return round(float(x.mid), 9)

    def div(self, x, y):
        iv.prec = self.precision
        return x / y

    def to_float(self, x) -> float:
        return float(x.mid)


def field_for(labels, precision: int = 200):
    """Pick the cheapest field that represents every label exactly, if any."""
    labels = set(labels)
    if labels <= {1, 2, 3, math.inf}:
        return IntegerField()
    if labels <= {1, 2, 3, 4, 6, math.inf}:
        return SurdField()
    return IntervalField(precision)

"""Exact arithmetic in Q and the real quadratic fields Q(sqrt 2), Q(sqrt 3).

A value is stored as ``(p + q*sqrt(d)) / den`` with integers ``p, q`` and a
positive integer ``den`` such that ``gcd(p, q, den) == 1``.  The public
coordinates ``a`` and ``b`` are exposed as reduced :class:`fractions.Fraction`
objects, so ``x == a + b*sqrt(d)``.

Rationals always carry ``d == 1`` and ``q == 0``; they mix freely with either
quadratic field.  Mixing ``sqrt 2`` with ``sqrt 3`` raises :class:`FieldError`.
"""

from __future__ import annotations

import re
from decimal import ROUND_HALF_UP, Decimal, localcontext
from fractions import Fraction
from math import gcd, isqrt
from numbers import Rational

__all__ = [
    "FieldError",
    "QuadExt",
    "Rational",
    "SQRT2",
    "SQRT3",
    "ZERO",
    "ONE",
    "arith",
    "sign",
    "approx",
    "parse",
    "to_json",
    "from_json",
]

SUPPORTED_RADICANDS = (1, 2, 3)
_SQRT_FLOAT = {1: 1.0, 2: 2 ** 0.5, 3: 3 ** 0.5}


class FieldError(ArithmeticError):
    """Raised when operands live in incompatible quadratic fields."""


def _join_radicand(d1: int, d2: int) -> int:
    if d1 == d2 or d2 == 1:
        return d1
    if d1 == 1:
        return d2
    raise FieldError(f"cannot mix Q(sqrt {d1}) with Q(sqrt {d2})")


class QuadExt:
    """An exact real number ``a + b*sqrt(d)`` with ``d`` in {1, 2, 3}.

    Instances are immutable and hashable.  Construct them from rationals::

        >>> QuadExt(1, 1, 2) * QuadExt(1, -1, 2)
        QuadExt('-1')
    """

    __slots__ = ("_p", "_q", "_den", "d")

    def __init__(self, a=0, b=0, d: int = 1):
        if d not in SUPPORTED_RADICANDS:
            raise FieldError(f"unsupported radicand {d}")
        a = Fraction(a)
        b = Fraction(b)
        den = a.denominator * b.denominator // gcd(a.denominator, b.denominator)
        self._set(a.numerator * (den // a.denominator), b.numerator * (den // b.denominator), den, d)

    def _set(self, p: int, q: int, den: int, d: int) -> None:
        if q == 0 or d == 1:
            if d == 1 and q:
                p += q
            q = 0
            d = 1
        g = gcd(p, q, den)
        if g != 1:
            p //= g
            q //= g
            den //= g
        self._p = p
        self._q = q
        self._den = den
        self.d = d

    @classmethod
    def _raw(cls, p: int, q: int, den: int, d: int) -> "QuadExt":
        obj = cls.__new__(cls)
        if den < 0:
            p, q, den = -p, -q, -den
        obj._set(p, q, den, d)
        return obj

    # -- coordinates -----------------------------------------------------

    @property
    def a(self) -> Fraction:
        return Fraction(self._p, self._den)

    @property
    def b(self) -> Fraction:
        return Fraction(self._q, self._den)

    def is_rational(self) -> bool:
        return self._q == 0

    def conjugate(self) -> "QuadExt":
        return QuadExt._raw(self._p, -self._q, self._den, self.d)

    def norm(self) -> Fraction:
        """Field norm ``a**2 - d*b**2``."""
        return Fraction(self._p * self._p - self.d * self._q * self._q, self._den * self._den)

    # -- arithmetic ------------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        d = _join_radicand(self.d, other.d)
        D1, D2 = self._den, other._den
        return QuadExt._raw(self._p * D2 + other._p * D1, self._q * D2 + other._q * D1, D1 * D2, d)

    __radd__ = __add__

    def __neg__(self):
        return QuadExt._raw(-self._p, -self._q, self._den, self.d)

    def __pos__(self):
        return self

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        d = _join_radicand(self.d, other.d)
        D1, D2 = self._den, other._den
        return QuadExt._raw(self._p * D2 - other._p * D1, self._q * D2 - other._q * D1, D1 * D2, d)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        d = _join_radicand(self.d, other.d)
        p1, q1, p2, q2 = self._p, self._q, other._p, other._q
        return QuadExt._raw(p1 * p2 + d * q1 * q2, p1 * q2 + p2 * q1, self._den * other._den, d)

    __rmul__ = __mul__

    def inverse(self) -> "QuadExt":
        n = self._p * self._p - self.d * self._q * self._q
        if n == 0:
            raise ZeroDivisionError("division by zero in QuadExt")
        return QuadExt._raw(self._den * self._p, -self._den * self._q, n, self.d)

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        _join_radicand(self.d, other.d)
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result = ONE
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- comparison ------------------------------------------------------

    def sign(self) -> int:
        p, q = self._p, self._q
        if q == 0:
            return (p > 0) - (p < 0)
        if p == 0:
            return (q > 0) - (q < 0)
        sp = 1 if p > 0 else -1
        sq = 1 if q > 0 else -1
        if sp == sq:
            return sp
        return sp if p * p > q * q * self.d else sq

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return (self._p, self._q, self._den) == (other._p, other._q, other._den) and (
            self._q == 0 or self.d == other.d
        )

    def __hash__(self):
        if self._q == 0:
            return hash(Fraction(self._p, self._den))
        return hash((self._p, self._q, self._den, self.d))

    def _cmp(self, other) -> int:
        other = _coerce(other)
        if other is NotImplemented:
            raise TypeError("unorderable")
        return (self - other).sign()

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __bool__(self):
        return self._p != 0 or self._q != 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __float__(self):
        # render path only
        return float(self.a) + float(self.b) * _SQRT_FLOAT[self.d]

    # -- presentation ----------------------------------------------------

    def __str__(self):
        a, b = self.a, self.b
        if b == 0:
            return str(a)
        head = "" if a == 0 else f"{a}"
        mag = abs(b)
        coef = "" if mag == 1 else f"{mag}*"
        if head:
            op = "+" if b > 0 else "-"
            return f"{head}{op}{coef}sqrt{self.d}"
        return f"{'-' if b < 0 else ''}{coef}sqrt{self.d}"

    def __repr__(self):
        return f"QuadExt({str(self)!r})"


def _coerce(x):
    if isinstance(x, QuadExt):
        return x
    if isinstance(x, (int, Rational)):
        f = Fraction(x)
        return QuadExt._raw(f.numerator, 0, f.denominator, 1)
    return NotImplemented


ZERO = QuadExt(0)
ONE = QuadExt(1)
SQRT2 = QuadExt(0, 1, 2)
SQRT3 = QuadExt(0, 1, 3)


def arith(op: str, x, y) -> QuadExt:
    """Apply one of ``add``, ``sub``, ``mul``, ``div`` to two field values."""
    x, y = _coerce(x), _coerce(y)
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div":
        return x / y
    raise ValueError(f"unknown operation {op!r}")


def sign(x) -> int:
    return _coerce(x).sign()


def _bounds(x: QuadExt, scale: int) -> tuple[Fraction, Fraction]:
    """Rationals ``lo <= x <= hi`` with ``hi - lo <= 1/scale``."""
    b = abs(x.b)
    if not b:
        return x.a, x.a
    root = isqrt(b.numerator * b.numerator * x.d * scale * scale // (b.denominator * b.denominator))
    lo = Fraction(root, scale)
    hi = Fraction(root + 1, scale)
    if x.b > 0:
        return x.a + lo, x.a + hi
    return x.a - hi, x.a - lo


def _round(value: Fraction, digits: int) -> str:
    with localcontext() as ctx:
        ctx.prec = len(str(abs(value.numerator))) + len(str(value.denominator)) + digits + 10
        dec = Decimal(value.numerator) / Decimal(value.denominator)
        return f"{dec.quantize(Decimal(1).scaleb(-digits), rounding=ROUND_HALF_UP):f}"


def approx(x, digits: int) -> str:
    """Decimal expansion of ``x`` with ``digits`` places, rounded half away from zero."""
    if digits < 1:
        raise ValueError("digits must be positive")
    x = _coerce(x)
    extra = digits + 6
    while True:
        lo, hi = _bounds(x, 10 ** extra)
        a, b = _round(lo, digits), _round(hi, digits)
        if a == b:
            return a
        extra *= 2


def parse(text: str) -> QuadExt:
    """Parse exact input such as ``"3/2"``, ``"1-2*sqrt2"``, ``"-sqrt3/2"``.

    Terms are separated by ``+``/``-``; a radical term may carry a rational
    coefficient before ``*`` or a ``/q`` divisor after ``sqrtd``.
    """
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty number")
    total = ZERO
    pos = 0
    pattern = re.compile(r"([+-]?)(?:(\d+(?:/\d+)?)\*?)?(sqrt(\d))?(?:/(\d+))?")
    while pos < len(s):
        m = pattern.match(s, pos)
        if not m or m.end() == pos or (m.group(2) is None and m.group(3) is None):
            raise ValueError(f"cannot parse {text!r}")
        sgn = -1 if m.group(1) == "-" else 1
        coef = Fraction(m.group(2)) if m.group(2) else Fraction(1)
        if m.group(5):
            coef /= int(m.group(5))
        if m.group(3):
            d = int(m.group(4))
            if d not in (2, 3):
                raise ValueError(f"unsupported radical sqrt{d}")
            term = QuadExt(0, sgn * coef, d)
        else:
            term = QuadExt(sgn * coef)
        total = total + term
        pos = m.end()
    return total


def to_json(x) -> dict:
    x = _coerce(x)
    return {"a": str(x.a), "b": str(x.b), "d": x.d}


def from_json(obj: dict) -> QuadExt:
    return QuadExt(Fraction(obj["a"]), Fraction(obj["b"]), int(obj["d"]))

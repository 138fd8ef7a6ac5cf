"""Exact arithmetic in Q(sqrt(D)) for a fixed square-free D > 1."""

from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import total_ordering
from typing import Union

Rational = Union[int, Fraction]


def is_squarefree(n: int) -> bool:
    if n < 1:
        return False
    k = 2
    while k * k <= n:
        if n % (k * k) == 0:
            return False
        k += 1
    return True


@total_ordering
class QuadraticNumber:
    """The number a + b*sqrt(D) with rational a, b.

    Comparisons and floor are exact. Two numbers with different D can only
    be combined when one of them is rational (b == 0).
    """

    __slots__ = ("a", "b", "D")

    def __init__(self, a: Rational, b: Rational = 0, D: int = 2) -> None:
        if not is_squarefree(D) or D < 2:
            raise ValueError(f"D must be a square-free integer > 1, got {D}")
        self.a = Fraction(a)
        self.b = Fraction(b)
        self.D = D

    @classmethod
    def sqrt(cls, D: int) -> QuadraticNumber:
        return cls(0, 1, D)

    @classmethod
    def golden(cls) -> QuadraticNumber:
        return cls(Fraction(1, 2), Fraction(1, 2), 5)

    # -- coercion ---------------------------------------------------------

    def _coerce(self, other) -> QuadraticNumber:
        if isinstance(other, QuadraticNumber):
            if other.D == self.D:
                return other
            if other.b == 0:
                return QuadraticNumber(other.a, 0, self.D)
            if self.b == 0:
                # self is rational; adopt the other field
                return other
            raise ValueError(f"cannot mix Q(sqrt({self.D})) and Q(sqrt({other.D}))")
        if isinstance(other, (int, Fraction)):
            return QuadraticNumber(other, 0, self.D)
        return NotImplemented

    def _field(self, other: QuadraticNumber) -> int:
        return self.D if self.b != 0 or other.b == 0 else other.D

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def conjugate(self) -> QuadraticNumber:
        return QuadraticNumber(self.a, -self.b, self.D)

    def norm(self) -> Fraction:
        return self.a * self.a - self.b * self.b * self.D

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadraticNumber(self.a + o.a, self.b + o.b, self._field(o))

    __radd__ = __add__

    def __neg__(self) -> QuadraticNumber:
        return QuadraticNumber(-self.a, -self.b, self.D)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        D = self._field(o)
        return QuadraticNumber(
            self.a * o.a + self.b * o.b * D, self.a * o.b + self.b * o.a, D
        )

    __rmul__ = __mul__

    def inverse(self) -> QuadraticNumber:
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        return QuadraticNumber(self.a / n, -self.b / n, self.D)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    # -- exact order ------------------------------------------------------

    def sign(self) -> int:
        a, b = self.a, self.b
        sa = (a > 0) - (a < 0)
        sb = (b > 0) - (b < 0)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        # opposite signs: whichever square dominates wins
        return sa if a * a > b * b * self.D else sb

    def __eq__(self, other) -> bool:
        o = self._coerce(other) if not isinstance(other, float) else NotImplemented
        if o is NotImplemented:
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __lt__(self, other) -> bool:
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return (self - o).sign() < 0

    def __hash__(self) -> int:
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.D))

    def __floor__(self) -> int:
        if self.b == 0:
            return math.floor(self.a)
        # float fast path, trusted only well away from an integer
        try:
            f = float(self)
            err = 1e-12 * (abs(float(self.a)) + abs(float(self.b)) * math.sqrt(self.D)) + 1e-300
            m = math.floor(f)
            if f - m > err and m + 1 - f > err:
                return m
        except OverflowError:
            pass
        c = math.lcm(self.a.denominator, self.b.denominator)
        A = int(self.a * c)
        B = int(self.b * c)
        s = math.isqrt(B * B * self.D)
        y = s if B > 0 else -(s + 1)  # floor(B*sqrt(D)), never an integer
        m = (A + y) // c
        while self - (m + 1) >= 0:
            m += 1
        while self - m < 0:
            m -= 1
        return m

    def __ceil__(self) -> int:
        return -math.floor(-self)

    def __float__(self) -> float:
        a, b = self.a, self.b
        if b == 0:
            return float(a)
        if a * b < 0:
            # a + b√D = (a² - D b²) / (a - b√D); the denominator has no cancellation
            return float((a * a - self.D * b * b) / (a - b * self._sqrt_fraction(abs(a) + abs(b))))
        return float(a + b * self._sqrt_fraction(abs(a) + abs(b)))

    def _sqrt_fraction(self, size: Fraction) -> Fraction:
        """√D to about 64 bits more than the bit size of ``size``."""
        bits = 64 + max(size.numerator.bit_length(), size.denominator.bit_length())
        return Fraction(math.isqrt(self.D << (2 * bits)), 1 << bits)

    def __repr__(self) -> str:
        return f"QuadraticNumber({self.a}, {self.b}, {self.D})"

    def __str__(self) -> str:
        if self.b == 0:
            return str(self.a)
        c = math.lcm(self.a.denominator, self.b.denominator)
        A, B = int(self.a * c), int(self.b * c)
        coef = {1: "", -1: "-"}.get(B, str(B))
        if A:
            coef = {1: "+", -1: "-"}.get(B, f"{B:+d}")
        body = f"{A}{coef}√{self.D}" if A else f"{coef}√{self.D}"
        return f"({body})/{c}" if c != 1 else body


Real = Union[int, Fraction, QuadraticNumber]


def as_quadratic(x: Real, D: int = 2) -> QuadraticNumber:
    if isinstance(x, QuadraticNumber):
        return x
    return QuadraticNumber(x, 0, D)


def exact_sign(x: Real) -> int:
    if isinstance(x, QuadraticNumber):
        return x.sign()
    return (x > 0) - (x < 0)


def exact_floor(x: Real) -> int:
    return math.floor(x)


def field_of(*xs: Real) -> int:
    """Common D of the irrational arguments (2 if all are rational)."""
    D = None
    for x in xs:
        if isinstance(x, QuadraticNumber) and x.b != 0:
            if D is not None and D != x.D:
                raise ValueError("arguments live in different quadratic fields")
            D = x.D
    return D or 2


def format_exact(x: Real) -> str:
    """Render as "p/q" or "(a+b√D)/c"."""
    if isinstance(x, QuadraticNumber):
        if x.b == 0:
            return format_exact(x.a)
        return str(x)
    f = Fraction(x)
    return f"{f.numerator}/{f.denominator}"


_ALIASES = {
    "sqrt2": QuadraticNumber.sqrt(2),
    "sqrt3": QuadraticNumber.sqrt(3),
    "sqrt5": QuadraticNumber.sqrt(5),
    "golden": QuadraticNumber.golden(),
}

_QUAD = re.compile(
    r"""^\(?\s*(?P<a>[+-]?\d+)?\s*(?P<sgn>[+-])?\s*(?P<b>\d+)?\s*\*?\s*
        (?:√|sqrt)\(?(?P<D>\d+)\)?\s*\)?\s*(?:/\s*(?P<c>\d+))?$""",
    re.VERBOSE,
)


def parse_real(text: str) -> Real:
    """Parse "p/q", an integer, an alias (sqrt2, golden, ...) or "a+b√D/c".

    In the quadratic form the optional "/c" divides the whole expression.
    """
    s = text.strip().replace(" ", "")
    if s.lower() in _ALIASES:
        return _ALIASES[s.lower()]
    if re.fullmatch(r"[+-]?\d+(/\d+)?", s):
        return Fraction(s)
    m = _QUAD.match(s)
    if not m:
        raise ValueError(f"unrecognised number {text!r}")
    a = int(m["a"] or 0)
    b = int(m["b"] or 1)
    if m["sgn"] is None and m["a"] is not None and m["b"] is None:
        a, b = 0, a  # "2√2" has no constant term
    if m["sgn"] == "-":
        b = -b
    c = int(m["c"] or 1)
    if c == 0:
        raise ValueError("zero denominator")
    return QuadraticNumber(Fraction(a, c), Fraction(b, c), int(m["D"]))

"""Exact elements (a + b*sqrt(d))/c of a real quadratic field.

Every point, interval endpoint and length in this package is a
FieldElement, so all comparisons are integer sign tests and no
floating point ever enters a decision.  Elements with b = 0 encode
rationals and are compatible with any d; mixing two genuinely
quadratic elements over different d raises FieldMismatchError.
"""

from __future__ import annotations

import re
from decimal import Decimal, localcontext
from fractions import Fraction
from math import gcd, isqrt


class FieldMismatchError(ValueError):
    """Raised when combining elements of distinct quadratic fields."""


def _as_field(x, d):
    if isinstance(x, FieldElement):
        return x
    if isinstance(x, int):
        return FieldElement(x, 0, 1, d)
    if isinstance(x, Fraction):
        return FieldElement(x.numerator, 0, x.denominator, d)
    raise TypeError(f"cannot coerce {type(x).__name__} to FieldElement")


class FieldElement:
    """Immutable exact value (a + b*sqrt(d))/c with gcd(a,b,c) = 1, c > 0."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a, b, c, d):
        if c == 0:
            raise ZeroDivisionError("denominator c must be nonzero")
        if d <= 0:
            raise ValueError("d must be a positive integer")
        if c < 0:
            a, b, c = -a, -b, -c
        g = gcd(gcd(abs(a), abs(b)), c)
        if g > 1:
            a //= g
            b //= g
            c //= g
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)

    def __setattr__(self, *_):
        raise AttributeError("FieldElement is immutable")

    # -- constructors -------------------------------------------------

    @staticmethod
    def rational(num, den=1, d=2):
        """Rational num/den carried inside the field with radicand d."""
        return FieldElement(num, 0, den, d)

    @staticmethod
    def sqrt_of(d):
        """sqrt(d) itself (d must be a square-free positive integer)."""
        return FieldElement(0, 1, 1, d)

    # -- basic queries ------------------------------------------------

    @property
    def is_rational(self):
        return self.b == 0

    def as_fraction(self):
        if self.b != 0:
            raise ValueError("not a rational element")
        return Fraction(self.a, self.c)

    def sign(self):
        """Exact sign in {-1, 0, 1}, by integer comparisons only."""
        a, b, d = self.a, self.b, self.d
        if b == 0:
            return (a > 0) - (a < 0)
        if a == 0:
            return (b > 0) - (b < 0)
        if a > 0 and b > 0:
            return 1
        if a < 0 and b < 0:
            return -1
        # opposite signs: compare a^2 with b^2 d on the dominant side
        lhs, rhs = a * a, b * b * d
        if a > 0:  # b < 0: positive iff a^2 > b^2 d
            return 1 if lhs > rhs else (-1 if lhs < rhs else 0)
        return -1 if lhs > rhs else (1 if lhs < rhs else 0)

    # -- field compatibility -------------------------------------------

    def _common_d(self, other):
        if self.b == 0:
            return other.d
        if other.b == 0:
            return self.d
        if self.d != other.d:
            raise FieldMismatchError(f"sqrt({self.d}) vs sqrt({other.d})")
        return self.d

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other):
        other = _as_field(other, self.d)
        d = self._common_d(other)
        return FieldElement(
            self.a * other.c + other.a * self.c,
            self.b * other.c + other.b * self.c,
            self.c * other.c,
            d,
        )

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(-self.a, -self.b, self.c, self.d)

    def __sub__(self, other):
        other = _as_field(other, self.d)
        return self + (-other)

    def __rsub__(self, other):
        return _as_field(other, self.d) - self

    def __mul__(self, other):
        other = _as_field(other, self.d)
        d = self._common_d(other)
        return FieldElement(
            self.a * other.a + self.b * other.b * d,
            self.a * other.b + self.b * other.a,
            self.c * other.c,
            d,
        )

    __rmul__ = __mul__

    def inverse(self):
        if self.sign() == 0:
            raise ZeroDivisionError("inverse of zero")
        # c / (a + b sqrt(d)) = c (a - b sqrt(d)) / (a^2 - b^2 d)
        norm = self.a * self.a - self.b * self.b * self.d
        return FieldElement(self.c * self.a, -self.c * self.b, norm, self.d)

    def __truediv__(self, other):
        other = _as_field(other, self.d)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return _as_field(other, self.d) * self.inverse()

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only non-negative integer powers")
        out = FieldElement(1, 0, 1, self.d)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # -- order ----------------------------------------------------------

    def _cmp(self, other):
        return (self - _as_field(other, self.d)).sign()

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = _as_field(other, self.d)
        if not isinstance(other, FieldElement):
            return NotImplemented
        if self.b == 0:
            return other.b == 0 and self.a == other.a and self.c == other.c
        return (
            other.b != 0
            and self.d == other.d
            and (self.a, self.b, self.c) == (other.a, other.b, other.c)
        )

    def __hash__(self):
        if self.b == 0:
            return hash(Fraction(self.a, self.c))
        return hash((self.a, self.b, self.c, self.d))

    # -- integer parts ----------------------------------------------------

    def floor(self):
        """Exact floor, via integer square root plus exact fix-up."""
        a, b, c, d = self.a, self.b, self.c, self.d
        s = isqrt(b * b * d)
        est = (a + (s if b >= 0 else -s)) // c
        # the isqrt estimate is within 1; correct by exact comparison
        while self._cmp(est) < 0:
            est -= 1
        while self._cmp(est + 1) >= 0:
            est += 1
        return est

    def ceil(self):
        return -((-self).floor())

    def mod1(self):
        """Representative of the value mod 1 in [0, 1)."""
        return self - self.floor()

    # -- output -----------------------------------------------------------

    def exact_str(self):
        """Canonical exact serialization '(a+b*sqrt(d))/c'."""
        sign = "+" if self.b >= 0 else "-"
        return f"({self.a}{sign}{abs(self.b)}*sqrt({self.d}))/{self.c}"

    def decimal_str(self, digits=17):
        """Decimal approximation with the given significant digits."""
        with localcontext() as ctx:
            ctx.prec = digits + 25
            val = (Decimal(self.a) + Decimal(self.b) * Decimal(self.d).sqrt()) / Decimal(self.c)
            ctx.prec = digits
            val = +val
        return str(val)

    def __float__(self):
        return float(self.decimal_str(25))

    def __repr__(self):
        return f"FieldElement({self.exact_str()} ~ {self.decimal_str(8)})"


_EXACT_RE = re.compile(
    r"^\(\s*(-?\d+)\s*([+-])\s*(\d+)\s*\*\s*sqrt\(\s*(\d+)\s*\)\s*\)\s*/\s*(\d+)$"
)
_RATIONAL_RE = re.compile(r"^(-?\d+)\s*(?:/\s*(\d+))?$")


def parse_exact(text, default_d=2):
    """Parse '(a+b*sqrt(d))/c' or a plain rational 'p/q' string."""
    text = text.strip()
    m = _EXACT_RE.match(text)
    if m:
        a, sgn, b, d, c = m.groups()
        b = int(b) if sgn == "+" else -int(b)
        return FieldElement(int(a), b, int(c), int(d))
    m = _RATIONAL_RE.match(text)
    if m:
        num, den = m.groups()
        return FieldElement(int(num), 0, int(den or 1), default_d)
    raise ValueError(f"not an exact number: {text!r}")


def floor_sum(n, alpha, beta):
    """Exact sum of floor(i*alpha + beta) for i = 0 .. n-1.

    alpha and beta are FieldElements (any sign); runs in O(depth) exact
    steps where depth is the length of the continued-fraction descent of
    alpha, so n may be astronomically large.
    """
    if n <= 0:
        return 0
    d = alpha.d if isinstance(alpha, FieldElement) else getattr(beta, "d", 2)
    alpha = _as_field(alpha, d)
    beta = _as_field(beta, d)
    total = 0
    guard = 0
    while True:
        guard += 1
        if guard > 10_000:
            raise RuntimeError("floor_sum failed to terminate")
        a0 = alpha.floor()
        b0 = beta.floor()
        if a0:
            total += a0 * (n * (n - 1) // 2)
            alpha = alpha - a0
        if b0:
            total += b0 * n
            beta = beta - b0
        if alpha.sign() == 0:
            return total
        m = ((n - 1) * alpha + beta).floor()
        if m <= 0:
            return total
        # sum_{i<n} floor(i a + b) = n m + sum_{t<m} floor((b - 1 - t)/a)
        total += n * m
        alpha, beta, n = -alpha.inverse(), (beta - 1) * alpha.inverse(), m

"""Exact arithmetic in real quadratic fields.

A value is stored as (p + q*sqrt(d)) / r with integer p, q, r, r > 0,
gcd(p, q, r) = 1 and d squarefree.  Rationals are the special case
q = 0, d = 0.  Two values can be combined exactly when they live in the
same field (equal d, or one of them rational); mixing distinct fields
raises ValidationError because the sum would leave every quadratic field.

The module also evaluates purely periodic continued fractions exactly:
[a1; a2, ..., ap, a1, a2, ...] is the attracting fixed point of the
composition of x -> a + 1/x steps, hence the positive root of an integer
quadratic whose discriminant is trace^2 - 4*det of the word matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence, Union

from .errors import ValidationError

_FACTOR_LIMIT = 10**12  # trial-division bound for squarefree extraction

Rational = Union[int, Fraction]


@lru_cache(maxsize=65536)
def squarefree_split(n: int) -> tuple[int, int]:
    """Write n = s*s*d with d squarefree; return (s, d).  Requires n >= 0."""
    if n < 0:
        raise ValidationError("negative radicand")
    if n == 0:
        return 0, 0
    if n > _FACTOR_LIMIT:
        raise ValidationError(f"radicand {n} above exact-arithmetic factor limit")
    s, d = 1, 1
    m = n
    f = 2
    while f * f <= m:
        if m % f == 0:
            e = 0
            while m % f == 0:
                m //= f
                e += 1
            s *= f ** (e // 2)
            if e % 2:
                d *= f
        f += 1 if f == 2 else 2
    d *= m
    return s, d


@dataclass(frozen=True)
class QuadraticSurd:
    """(p + q*sqrt(d)) / r, normalized.  Immutable and hashable."""

    p: int
    q: int
    r: int
    d: int

    def __post_init__(self) -> None:
        if self.r <= 0:
            raise ValidationError("denominator must be positive")
        if self.q == 0 and self.d != 0:
            raise ValidationError("rational surd must carry d = 0")
        if self.q != 0 and self.d < 2:
            raise ValidationError("irrational surd needs squarefree d >= 2")

    # -- construction -------------------------------------------------

    @staticmethod
    def make(p: int, q: int, r: int, d: int) -> "QuadraticSurd":
        """Normalize and build.  Accepts non-squarefree d."""
        if r == 0:
            raise ZeroDivisionError("surd with zero denominator")
        if q != 0 and d > 0:
            s, d = squarefree_split(d)
            q *= s
        if d == 1:  # radicand was a perfect square
            p, q, d = p + q, 0, 0
        if q == 0:
            d = 0
        if d == 0:
            q = 0
        if r < 0:
            p, q, r = -p, -q, -r
        g = math.gcd(math.gcd(abs(p), abs(q)), r)
        if g > 1:
            p, q, r = p // g, q // g, r // g
        return QuadraticSurd(p, q, r, d)

    @staticmethod
    def from_rational(x: Rational) -> "QuadraticSurd":
        f = Fraction(x)
        return QuadraticSurd.make(f.numerator, 0, f.denominator, 0)

    @staticmethod
    def sqrt_of_int(n: int) -> "QuadraticSurd":
        return QuadraticSurd.make(0, 1, 1, n)

    @staticmethod
    def quadratic_root(a: int, b: int, c: int, branch: int = +1) -> "QuadraticSurd":
        """Root (-b + branch*sqrt(b*b - 4*a*c)) / (2*a) of a*x^2+b*x+c."""
        if a == 0:
            raise ZeroDivisionError("not a quadratic")
        disc = b * b - 4 * a * c
        if disc < 0:
            raise ValidationError("complex roots")
        return QuadraticSurd.make(-b, branch, 2 * a, disc)

    # -- predicates ----------------------------------------------------

    @property
    def is_rational(self) -> bool:
        return self.q == 0

    def as_fraction(self) -> Fraction:
        if not self.is_rational:
            raise ValidationError("irrational surd")
        return Fraction(self.p, self.r)

    # -- field plumbing -------------------------------------------------

    def _compatible(self, other: "QuadraticSurd") -> int:
        if self.q == 0:
            return other.d
        if other.q == 0 or other.d == self.d:
            return self.d
        raise ValidationError(f"mixing sqrt({self.d}) with sqrt({other.d})")

    @staticmethod
    def _coerce(x: "SurdLike") -> "QuadraticSurd":
        if isinstance(x, QuadraticSurd):
            return x
        return QuadraticSurd.from_rational(x)

    # -- arithmetic -----------------------------------------------------

    def __add__(self, other: "SurdLike") -> "QuadraticSurd":
        o = self._coerce(other)
        d = self._compatible(o)
        return QuadraticSurd.make(
            self.p * o.r + o.p * self.r, self.q * o.r + o.q * self.r, self.r * o.r, d
        )

    __radd__ = __add__

    def __neg__(self) -> "QuadraticSurd":
        return QuadraticSurd.make(-self.p, -self.q, self.r, self.d)

    def __sub__(self, other: "SurdLike") -> "QuadraticSurd":
        return self + (-self._coerce(other))

    def __rsub__(self, other: "SurdLike") -> "QuadraticSurd":
        return self._coerce(other) + (-self)

    def __mul__(self, other: "SurdLike") -> "QuadraticSurd":
        o = self._coerce(other)
        d = self._compatible(o)
        dd = self.d if self.d else o.d
        p = self.p * o.p + self.q * o.q * dd
        q = self.p * o.q + self.q * o.p
        return QuadraticSurd.make(p, q, self.r * o.r, d if q else 0)

    __rmul__ = __mul__

    def inverse(self) -> "QuadraticSurd":
        # 1/((p+q*sqrt(d))/r) = r*(p - q*sqrt(d)) / (p^2 - q^2 d)
        norm = self.p * self.p - self.q * self.q * self.d
        if norm == 0:
            raise ZeroDivisionError("surd is zero")
        return QuadraticSurd.make(self.r * self.p, -self.r * self.q, norm, self.d)

    def __truediv__(self, other: "SurdLike") -> "QuadraticSurd":
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other: "SurdLike") -> "QuadraticSurd":
        return self._coerce(other) * self.inverse()

    def conjugate(self) -> "QuadraticSurd":
        return QuadraticSurd.make(self.p, -self.q, self.r, self.d)

    # -- order ----------------------------------------------------------

    def sign(self) -> int:
        """Exact sign of the value: -1, 0, or +1."""
        t, q = self.p, self.q
        if q == 0:
            return (t > 0) - (t < 0)
        if t >= 0 and q > 0:
            return 1
        if t <= 0 and q < 0:
            return -1
        # opposite signs: compare t^2 against q^2 d
        tt, qq = t * t, q * q * self.d
        if tt == qq:
            return 0
        bigger_rational = tt > qq
        return (1 if bigger_rational else -1) * (1 if t > 0 else -1)

    def _cmp(self, other: "SurdLike") -> int:
        return (self - other).sign()

    def __lt__(self, other: "SurdLike") -> bool:
        return self._cmp(other) < 0

    def __le__(self, other: "SurdLike") -> bool:
        return self._cmp(other) <= 0

    def __gt__(self, other: "SurdLike") -> bool:
        return self._cmp(other) > 0

    def __ge__(self, other: "SurdLike") -> bool:
        return self._cmp(other) >= 0

    def equals(self, other: "SurdLike") -> bool:
        return self._cmp(other) == 0

    # -- conversions ----------------------------------------------------

    def __float__(self) -> float:
        if self.q == 0:
            return float(Fraction(self.p, self.r))
        # exact integer arithmetic with enough fractional bits of sqrt(d)
        # that p and q*sqrt(d) cannot cancel below the working precision;
        # doubling terminates because a normalized surd with q != 0 is
        # irrational, hence p + q*sqrt(d) != 0.
        shift = 60
        while True:
            root = math.isqrt(self.d << (2 * shift))  # floor(2^shift * sqrt(d))
            num = (self.p << shift) + self.q * root
            if abs(num) > abs(self.q) << 60:  # |error| <= |q|: 60 guard bits
                return float(Fraction(num, self.r << shift))
            shift *= 2

    def floor(self) -> int:
        k = math.floor(float(self))
        while self._cmp(k) < 0:
            k -= 1
        while self._cmp(k + 1) >= 0:
            k += 1
        return k

    def __repr__(self) -> str:
        if self.q == 0:
            return f"Surd({Fraction(self.p, self.r)})"
        return f"Surd(({self.p} + {self.q}*sqrt({self.d}))/{self.r})"


SurdLike = Union[QuadraticSurd, int, Fraction]


def word_matrix(word: Sequence[int]) -> tuple[int, int, int, int]:
    """Product of [[a, 1], [1, 0]] over the word, as (m00, m01, m10, m11)."""
    m00, m01, m10, m11 = 1, 0, 0, 1
    for a in word:
        if a < 1:
            raise ValidationError("continued-fraction digits must be >= 1")
        m00, m01, m10, m11 = m00 * a + m01, m00, m10 * a + m11, m10
    return m00, m01, m10, m11


def periodic_value(word: Sequence[int]) -> QuadraticSurd:
    """Exact value of the purely periodic continued fraction [w; w, w, ...].

    The result is > 1.  Raises ValidationError for an empty word or when the
    discriminant exceeds the exact-factorization limit.
    """
    word = tuple(word)
    if not word:
        raise ValidationError("empty period")
    m00, m01, m10, m11 = word_matrix(word)
    # x = (m00 x + m01)/(m10 x + m11)  ->  m10 x^2 + (m11 - m00) x - m01 = 0
    return QuadraticSurd.quadratic_root(m10, m11 - m00, -m01, branch=+1)


def periodic_tail_value(word: Sequence[int]) -> QuadraticSurd:
    """Exact value of [0; w, w, w, ...] in (0, 1)."""
    return periodic_value(word).inverse()


def periodic_value_float(word: Sequence[int], reps: int = 48) -> float:
    """Floating value of [w; w, ...] without exact factorization.

    Evaluates a deep finite truncation backwards; the tail error after
    k digits is below 1/q_k^2 which underflows double precision long
    before `reps * len(word)` digits for any admissible word.
    """
    word = tuple(word)
    if not word:
        raise ValidationError("empty period")
    digits = word * max(2, reps)
    x = float(digits[-1])
    for a in reversed(digits[:-1]):
        x = a + 1.0 / x
    return x

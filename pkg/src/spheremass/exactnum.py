"""Exact arithmetic kernel.

Every quantity in the mass series lives in the field ``Q + Q*ln2``.  Values
are carried as :class:`ExactValue` pairs of :class:`fractions.Fraction` and
only meet the irrational ``ln 2`` when an enclosure is requested through
:func:`eval_interval`.
"""

from __future__ import annotations

import math
import sys
import threading
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Union

Rational = Fraction
RationalLike = Union[int, Fraction]

__all__ = [
    "Rational",
    "ExactValue",
    "RatInterval",
    "LN2",
    "ln2_enclosure",
    "eval_interval",
    "sqrt_upper",
    "decimal_string",
    "decimal_floor",
    "decimal_ceil",
    "exact_sum",
    "unbounded_int_digits",
]


def _as_fraction(x: RationalLike) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected int or Fraction, got {type(x).__name__}")


@dataclass(frozen=True, slots=True)
class ExactValue:
    """The number ``a + b*ln2`` with rational ``a`` and ``b``.

    Since ln 2 is irrational the pair ``(a, b)`` is unique, so structural
    equality is numerical equality.
    """

    a: Fraction = Fraction(0)
    b: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "a", _as_fraction(self.a))
        object.__setattr__(self, "b", _as_fraction(self.b))

    @classmethod
    def rational(cls, a: RationalLike) -> "ExactValue":
        return cls(_as_fraction(a), Fraction(0))

    def __add__(self, other):
        if isinstance(other, ExactValue):
            return ExactValue(self.a + other.a, self.b + other.b)
        if isinstance(other, (int, Fraction)):
            return ExactValue(self.a + other, self.b)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return ExactValue(-self.a, -self.b)

    def __sub__(self, other):
        if isinstance(other, ExactValue):
            return ExactValue(self.a - other.a, self.b - other.b)
        if isinstance(other, (int, Fraction)):
            return ExactValue(self.a - other, self.b)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        # only rational scaling keeps us inside Q + Q*ln2
        if isinstance(other, (int, Fraction)):
            return ExactValue(self.a * other, self.b * other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("ExactValue division by zero")
            return ExactValue(self.a / other, self.b / other)
        return NotImplemented

    def is_rational(self) -> bool:
        return self.b == 0

    def __float__(self) -> float:
        # diagnostics only; suffers from cancellation when |a|, |b| are large
        return float(self.a) + float(self.b) * math.log(2.0)

    def __str__(self) -> str:
        if self.b == 0:
            return str(self.a)
        sign = "-" if self.b < 0 else "+"
        return f"{self.a} {sign} {abs(self.b)}*ln2"


LN2 = ExactValue(Fraction(0), Fraction(1))


def exact_sum(values: Iterable[ExactValue]) -> ExactValue:
    """Pairwise (tree) summation; exact, so order only affects speed."""
    items = list(values)
    if not items:
        return ExactValue()
    while len(items) > 1:
        nxt = [items[i] + items[i + 1] for i in range(0, len(items) - 1, 2)]
        if len(items) % 2:
            nxt.append(items[-1])
        items = nxt
    return items[0]


@dataclass(frozen=True, slots=True)
class RatInterval:
    """Closed interval with exact rational endpoints."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        lo = _as_fraction(self.lo)
        hi = _as_fraction(self.hi)
        if lo > hi:
            raise ValueError(f"empty interval: lo={lo} > hi={hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def point(cls, x: RationalLike) -> "RatInterval":
        x = _as_fraction(x)
        return cls(x, x)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def __add__(self, other):
        if isinstance(other, RatInterval):
            return RatInterval(self.lo + other.lo, self.hi + other.hi)
        if isinstance(other, (int, Fraction)):
            return RatInterval(self.lo + other, self.hi + other)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return RatInterval(-self.hi, -self.lo)

    def __sub__(self, other):
        if isinstance(other, (RatInterval, int, Fraction)):
            return self + (-other)
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if other >= 0:
                return RatInterval(self.lo * other, self.hi * other)
            return RatInterval(self.hi * other, self.lo * other)
        return NotImplemented

    __rmul__ = __mul__

    def widen(self, r: RationalLike) -> "RatInterval":
        """Minkowski sum with ``[-r, r]``."""
        r = _as_fraction(r)
        if r < 0:
            raise ValueError("widening radius must be nonnegative")
        return RatInterval(self.lo - r, self.hi + r)

    def reciprocal(self) -> "RatInterval":
        if self.lo <= 0 <= self.hi:
            raise ZeroDivisionError("interval contains zero")
        return RatInterval(1 / self.hi, 1 / self.lo)

    def contains(self, x) -> bool:
        if isinstance(x, RatInterval):
            return self.lo <= x.lo and x.hi <= self.hi
        if isinstance(x, float):
            x = Fraction(x)
        return self.lo <= x <= self.hi

    __contains__ = contains

    def is_disjoint(self, other: "RatInterval") -> bool:
        return self.hi < other.lo or other.hi < self.lo

    def __float__(self) -> float:
        return float(self.mid)


# atanh(1/3) series:  ln 2 = 2 * sum_{k>=0} 1 / ((2k+1) * 3^(2k+1))


def _ln2_term(k: int) -> Fraction:
    return Fraction(2, (2 * k + 1) * 3 ** (2 * k + 1))


_LN2_PARTIALS = [Fraction(0)]
_LN2_LOCK = threading.Lock()


def _ln2_partial(terms: int) -> Fraction:
    with _LN2_LOCK:
        while len(_LN2_PARTIALS) <= terms:
            k = len(_LN2_PARTIALS) - 1
            _LN2_PARTIALS.append(_LN2_PARTIALS[-1] + _ln2_term(k))
        return _LN2_PARTIALS[terms]


def _ln2_terms_for(decimal_digits: int) -> int:
    target = Fraction(1, 10**decimal_digits)
    k = 0
    # tail after k terms is at most (9/8) * term(k)
    while Fraction(9, 8) * _ln2_term(k) > target:
        k += 1
    return k


@lru_cache(maxsize=256)
def ln2_enclosure(decimal_digits: int) -> RatInterval:
    """Rational interval containing ln 2 with width at most ``10**-decimal_digits``.

    The lower endpoint is a partial sum of the atanh(1/3) series; the upper
    endpoint adds the geometric bound ``(9/8) * next_term`` for the tail.
    Enclosures are nested in ``decimal_digits``.
    """
    if decimal_digits < 1:
        raise ValueError("decimal_digits must be >= 1")
    k = _ln2_terms_for(decimal_digits)
    lo = _ln2_partial(k)
    return RatInterval(lo, lo + Fraction(9, 8) * _ln2_term(k))


def eval_interval(v: ExactValue, decimal_digits: int) -> RatInterval:
    """Enclosure of ``v.a + v.b*ln2`` with width at most ``|v.b| * 10**-decimal_digits``."""
    if v.b == 0:
        return RatInterval.point(v.a)
    return v.b * ln2_enclosure(decimal_digits) + v.a


def sqrt_upper(r: RationalLike) -> Fraction:
    """Rational ``s >= sqrt(r)`` with ``s <= sqrt(r) * (1 + 1e-6)``."""
    r = _as_fraction(r)
    if r < 0:
        raise ValueError(f"sqrt_upper of negative number {r}")
    if r == 0:
        return Fraction(0)
    n, d = r.numerator, r.denominator
    # scale = 2**e with 2**e * sqrt(r) >= 2**24 > 1e7
    log2_sqrt = (n.bit_length() - d.bit_length()) // 2
    e = max(0, 26 - log2_sqrt)
    scaled = (n << (2 * e)) // d
    s = Fraction(math.isqrt(scaled) + 1, 1 << e)
    assert s * s >= r
    return s


def _floor_scaled(x: Fraction, places: int) -> int:
    return (x.numerator * 10**places) // x.denominator


def _ceil_scaled(x: Fraction, places: int) -> int:
    return -((-x.numerator * 10**places) // x.denominator)


def _format_scaled(m: int, places: int) -> str:
    sign = "-" if m < 0 else ""
    digits = str(abs(m)).rjust(places + 1, "0")
    if places == 0:
        return sign + digits
    return f"{sign}{digits[:-places]}.{digits[-places:]}"


def decimal_floor(x: RationalLike, places: int) -> str:
    """``x`` rounded toward -inf to ``places`` decimals."""
    if places < 0:
        raise ValueError("places must be nonnegative")
    return _format_scaled(_floor_scaled(Fraction(x), places), places)


def decimal_ceil(x: RationalLike, places: int) -> str:
    """``x`` rounded toward +inf to ``places`` decimals."""
    if places < 0:
        raise ValueError("places must be nonnegative")
    return _format_scaled(_ceil_scaled(Fraction(x), places), places)


def decimal_string(i: RatInterval, places: int) -> str:
    """Render ``i`` as ``"lo .. hi"`` rounded outward to ``places`` decimals."""
    return f"{decimal_floor(i.lo, places)} .. {decimal_ceil(i.hi, places)}"


@contextmanager
def unbounded_int_digits():
    """Temporarily lift CPython's int<->str digit limit (exact values get long)."""
    getter = getattr(sys, "get_int_max_str_digits", None)
    if getter is None:
        yield
        return
    old = getter()
    sys.set_int_max_str_digits(0)
    try:
        yield
    finally:
        sys.set_int_max_str_digits(old)

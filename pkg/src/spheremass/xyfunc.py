"""Exact calculus on rational functions ``num(x, y) / (x + y)**k``.

This family is closed under differentiation, multiplication and the
conformal Laplacian written in the coordinates ``x = (1 - cos r1)/2``,
``y = (1 - cos r2)/2``:

    box u = -6 { x(1-x) u_xx + (1-2x) u_x + y(1-y) u_yy + (1-2y) u_y } + 4 u

Objects are immutable and always kept in canonical form (no factor of
``x + y`` left in the numerator when ``k > 0``), so ``==`` is equality of
functions.
"""

from __future__ import annotations

from collections import defaultdict
from fractions import Fraction
from typing import Iterable, Mapping, Union

from .basis import binomial

__all__ = [
    "BiPoly",
    "XYRational",
    "d_dx",
    "d_dy",
    "box_xy",
    "evaluate",
    "X",
    "Y",
    "ONE",
    "G_MINUS_2",
    "F_SOURCE",
]

Scalar = Union[int, Fraction]
Monomial = tuple[int, int]


class BiPoly:
    """Sparse bivariate polynomial with rational coefficients."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, Scalar] | Iterable[tuple[Monomial, Scalar]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Monomial, Scalar] = defaultdict(int)
        for (i, j), c in items:
            if i < 0 or j < 0:
                raise ValueError(f"negative exponent in monomial {(i, j)}")
            acc[(i, j)] += c
        self._terms = {
            m: c if type(c) is Fraction else Fraction(c) for m, c in sorted(acc.items()) if c != 0
        }
        self._hash = None

    @classmethod
    def constant(cls, c: Scalar) -> "BiPoly":
        return cls({(0, 0): c})

    @property
    def terms(self) -> dict[Monomial, Fraction]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        return max((i + j for i, j in self._terms), default=-1)

    def min_degree(self) -> int:
        return min((i + j for i, j in self._terms), default=-1)

    def __eq__(self, other):
        if isinstance(other, BiPoly):
            return self._terms == other._terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple(self._terms.items()))
        return self._hash

    def __repr__(self):
        if not self._terms:
            return "BiPoly(0)"
        parts = [f"{c}*x^{i}*y^{j}" for (i, j), c in self._terms.items()]
        return "BiPoly(" + " + ".join(parts) + ")"

    def __add__(self, other: "BiPoly") -> "BiPoly":
        return BiPoly(list(self._terms.items()) + list(other._terms.items()))

    def __neg__(self) -> "BiPoly":
        return BiPoly({m: -c for m, c in self._terms.items()})

    def __sub__(self, other: "BiPoly") -> "BiPoly":
        return self + (-other)

    def scale(self, c: Scalar) -> "BiPoly":
        return BiPoly({m: c * v for m, v in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, BiPoly):
            return NotImplemented
        acc: dict[Monomial, Scalar] = defaultdict(int)
        for (i1, j1), c1 in self._terms.items():
            for (i2, j2), c2 in other._terms.items():
                acc[(i1 + i2, j1 + j2)] += c1 * c2
        return BiPoly(acc)

    __rmul__ = __mul__

    def times_sum_power(self, m: int) -> "BiPoly":
        """Multiply by ``(x + y)**m``."""
        if m == 0:
            return self
        return self * BiPoly({(i, m - i): binomial(m, i) for i in range(m + 1)})

    def diff_x(self) -> "BiPoly":
        return BiPoly({(i - 1, j): i * c for (i, j), c in self._terms.items() if i > 0})

    def diff_y(self) -> "BiPoly":
        return BiPoly({(i, j - 1): j * c for (i, j), c in self._terms.items() if j > 0})

    def __call__(self, x, y):
        total = 0
        for (i, j), c in self._terms.items():
            total += c * x**i * y**j
        return total

    def divmod_sum(self) -> tuple["BiPoly", "BiPoly"]:
        """Divide by ``x + y`` treating the numerator as a polynomial in ``x``.

        Returns ``(quotient, remainder)``; the remainder has no ``x`` and is
        zero exactly when ``x + y`` divides ``self``.
        """
        by_x: dict[int, dict[int, Fraction]] = defaultdict(dict)
        for (i, j), c in self._terms.items():
            by_x[i][j] = c
        if not by_x:
            return BiPoly(), BiPoly()
        top = max(by_x)
        quotient: dict[Monomial, Fraction] = {}
        # synthetic division by the root x = -y, from the top x-degree down
        carry: dict[int, Fraction] = {}
        for i in range(top, 0, -1):
            row = dict(by_x.get(i, {}))
            for j, c in carry.items():
                row[j] = row.get(j, Fraction(0)) + c
            for j, c in row.items():
                if c:
                    quotient[(i - 1, j)] = c
            carry = {j + 1: -c for j, c in row.items() if c}
        rem = dict(by_x.get(0, {}))
        for j, c in carry.items():
            rem[j] = rem.get(j, Fraction(0)) + c
        return BiPoly(quotient), BiPoly({(0, j): c for j, c in rem.items()})


class XYRational:
    """Canonical ``num / (x + y)**k``."""

    __slots__ = ("num", "k")

    def __init__(self, num: BiPoly | Scalar, k: int = 0):
        if not isinstance(num, BiPoly):
            num = BiPoly.constant(num)
        if k < 0:
            num = num.times_sum_power(-k)
            k = 0
        if num.is_zero():
            k = 0
        while k > 0:
            quot, rem = num.divmod_sum()
            if not rem.is_zero():
                break
            num, k = quot, k - 1
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "k", k)

    def __setattr__(self, name, value):
        raise AttributeError("XYRational is immutable")

    @classmethod
    def poly(cls, terms: Mapping[Monomial, Scalar]) -> "XYRational":
        return cls(BiPoly(terms), 0)

    def canonical(self) -> "XYRational":
        return XYRational(self.num, self.k)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = XYRational(other)
        if isinstance(other, XYRational):
            return self.k == other.k and self.num == other.num
        return NotImplemented

    def __hash__(self):
        return hash((self.num, self.k))

    def __repr__(self):
        return f"XYRational({self.num!r}, k={self.k})"

    def _lift(self, k: int) -> BiPoly:
        return self.num.times_sum_power(k - self.k)

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = XYRational(other)
        if not isinstance(other, XYRational):
            return NotImplemented
        k = max(self.k, other.k)
        return XYRational(self._lift(k) + other._lift(k), k)

    __radd__ = __add__

    def __neg__(self):
        return XYRational(-self.num, self.k)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = XYRational(other)
        if not isinstance(other, XYRational):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return XYRational(self.num.scale(other), self.k)
        if isinstance(other, BiPoly):
            other = XYRational(other)
        if not isinstance(other, XYRational):
            return NotImplemented
        return XYRational(self.num * other.num, self.k + other.k)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers leave the (x+y)-denominator family")
        out = XYRational(1)
        for _ in range(n):
            out = out * self
        return out

    def __call__(self, x, y):
        return self.num(x, y) / (x + y) ** self.k

    def monomials(self):
        """Yield ``(coeff, a, b)`` for each term ``coeff * x^a y^b / (x+y)^k``."""
        for (a, b), c in self.num.items():
            yield c, a, b


def d_dx(u: XYRational) -> XYRational:
    # d/dx [p / s^k] = (p_x s - k p) / s^(k+1),  s = x + y
    if u.k == 0:
        return XYRational(u.num.diff_x(), 0)
    return XYRational(u.num.diff_x().times_sum_power(1) - u.num.scale(u.k), u.k + 1)


def d_dy(u: XYRational) -> XYRational:
    if u.k == 0:
        return XYRational(u.num.diff_y(), 0)
    return XYRational(u.num.diff_y().times_sum_power(1) - u.num.scale(u.k), u.k + 1)


X = XYRational.poly({(1, 0): 1})
Y = XYRational.poly({(0, 1): 1})
ONE = XYRational(1)

_XX = XYRational.poly({(1, 0): 1, (2, 0): -1})  # x(1-x)
_YY = XYRational.poly({(0, 1): 1, (0, 2): -1})  # y(1-y)
_DX = XYRational.poly({(0, 0): 1, (1, 0): -2})  # 1-2x
_DY = XYRational.poly({(0, 0): 1, (0, 1): -2})  # 1-2y


def box_xy(u: XYRational) -> XYRational:
    """Conformal Laplacian of ``u`` on the unit square, exactly."""
    ux, uy = d_dx(u), d_dy(u)
    second = _XX * d_dx(ux) + _DX * ux + _YY * d_dy(uy) + _DY * uy
    return second * (-6) + u * 4


def evaluate(u: XYRational, x: Scalar, y: Scalar) -> Fraction:
    x, y = Fraction(x), Fraction(y)
    s = x + y
    if u.k > 0 and s == 0:
        raise ValueError(f"pole: (x + y)^{u.k} vanishes at ({x}, {y})")
    return Fraction(u.num(x, y)) / s**u.k


# 1/(4(x+y)) + xy/(6(x+y)^2) + x^2 y^2/(9(x+y)^3): the singular part of the Green's function
G_MINUS_2 = (
    XYRational(Fraction(1, 4), 1)
    + XYRational(BiPoly({(1, 1): Fraction(1, 6)}), 2)
    + XYRational(BiPoly({(2, 2): Fraction(1, 9)}), 3)
)

# 8 x^2 y^2 (5x^2 - 8xy + 5y^2) / (9 (x+y)^5), the right-hand side solved for G_0
F_SOURCE = XYRational(
    BiPoly({(4, 2): Fraction(40, 9), (3, 3): Fraction(-64, 9), (2, 4): Fraction(40, 9)}), 5
)

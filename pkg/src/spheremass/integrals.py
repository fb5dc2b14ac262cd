"""Exact integrals over the unit square and its lower/upper triangles.

The workhorse is the triangle integral

    I(p, q; n) = int_0^1 int_0^y  x^p y^q / (x + y)^n  dx dy

which integration by parts reduces in ``n`` until either the ``p`` factor
kills the remainder or ``n = 1`` is reached, where a single ``ln 2`` appears.
Everything returned here is an :class:`ExactValue`.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .basis import alt_harmonic
from .exactnum import LN2, ExactValue
from .xyfunc import F_SOURCE, XYRational

__all__ = [
    "DivergentIntegralError",
    "i_base",
    "i_rec",
    "i5_closed",
    "half_numerator",
    "f_tilde",
    "f_tilde_assembled",
    "triangle_moment",
    "integrate_square",
    "integrate_triangle",
]


class DivergentIntegralError(ValueError):
    """Raised for parameter choices whose integral is infinite."""


def i_base(p: int, q: int) -> ExactValue:
    """``I(p, q; 1) = (-1)^p (ln 2 - A(p)) / (p + q + 1)``."""
    if p < 0 or q < 0:
        raise ValueError("p and q must be nonnegative")
    sign = -1 if p % 2 else 1
    return (LN2 - alt_harmonic(p)) * Fraction(sign, p + q + 1)


@lru_cache(maxsize=None)
def i_rec(p: int, q: int, n: int) -> ExactValue:
    """``I(p, q; n)`` through the reduction

        I(p,q;n) = -1 / (2^(n-1) (n-1) (p+q+2-n)) + p/(n-1) * I(p-1,q;n-1).

    The reduction only holds for ``p >= 1``: at ``p = 0`` the boundary term
    at ``x = 0`` survives and the integral is taken in closed form,
    ``I(0, q; n) = (1 - 2^(1-n)) / ((n-1)(q+2-n))``.  ``p + q + 2 - n`` is
    invariant along the recursion, so convergence is decided once up front.
    """
    if p < 0 or q < 0:
        raise ValueError("p and q must be nonnegative")
    if n < 1:
        raise ValueError("n must be positive")
    if n > 1 and p + q <= n - 2:
        raise DivergentIntegralError(f"I({p},{q};{n}) diverges (needs p+q > n-2)")
    gap = p + q + 2 - n
    acc = Fraction(0)
    coef = Fraction(1)
    while n > 1:
        if p == 0:
            return ExactValue(acc + coef * (1 - Fraction(1, 2 ** (n - 1))) / ((n - 1) * gap))
        acc -= coef / (2 ** (n - 1) * (n - 1) * gap)
        coef = coef * p / (n - 1)
        p, n = p - 1, n - 1
    return i_base(p, q) * coef + acc


def i5_closed(p: int, q: int) -> ExactValue:
    """Closed forms for ``I(p, q; 5)`` on the three families where they hold."""
    if p >= 4 and q >= 0:
        d = p + q - 3
        rational = -Fraction(4 * p**3 - 10 * p**2 + 8 * p + 3, 192 * d)
        falling = p * (p - 1) * (p - 2) * (p - 3)
        sign = -1 if p % 2 else 1
        return (LN2 - alt_harmonic(p - 4)) * Fraction(sign * falling, 24 * d) + rational
    if p == 3 and q >= 1:
        return ExactValue(Fraction(1, 64 * q))
    if p == 2 and q >= 2:
        return ExactValue(Fraction(5, 192 * (q - 1)))
    raise DivergentIntegralError(f"no closed form for I({p},{q};5)")


@lru_cache(maxsize=None)
def half_numerator(p: int) -> ExactValue:
    """One index's share of the bracket in the closed form of ``f~_{p,q}``.

    ``f~_{p,q} = (h(p) + h(q)) / (18 (p + q + 3))`` with
    ``h(p) = -109/2 - 68p - 33p^2 - 6p^3 + 4(-1)^p (p+1)(p+2)(3p^2+9p+10)(ln2 - A(p))``.
    """
    sign = -1 if p % 2 else 1
    log_coef = 4 * sign * (p + 1) * (p + 2) * (3 * p * p + 9 * p + 10)
    poly = Fraction(-109, 2) - 68 * p - 33 * p**2 - 6 * p**3
    return ExactValue(poly - log_coef * alt_harmonic(p), Fraction(log_coef))


@lru_cache(maxsize=None)
def f_tilde(p: int, q: int) -> ExactValue:
    """Moment ``int int f(x,y) x^p y^q dx dy`` over the unit square, closed form."""
    if p < 0 or q < 0:
        raise ValueError("p and q must be nonnegative")
    if q < p:
        return f_tilde(q, p)
    return (half_numerator(p) + half_numerator(q)) / (18 * (p + q + 3))


def triangle_moment(p: int, q: int) -> ExactValue:
    """``int_0^1 int_0^y f x^p y^q dx dy`` from three ``I(.,.;5)`` values.

    Closed form: ``h(p) / (18 (p + q + 3))``, see :func:`half_numerator`.
    """
    # f = 8x^2y^2(5x^2 - 8xy + 5y^2) / (9 (x+y)^5)
    return (i_rec(p + 4, q + 2, 5) * 5 - i_rec(p + 3, q + 3, 5) * 8 + i_rec(p + 2, q + 4, 5) * 5) * Fraction(8, 9)


def f_tilde_assembled(p: int, q: int) -> ExactValue:
    """Same moment as :func:`f_tilde`, assembled from triangle integrals."""
    return triangle_moment(p, q) + triangle_moment(q, p)


def integrate_triangle(u: XYRational) -> ExactValue:
    """Exact ``int_0^1 int_0^y u dx dy`` (the triangle ``x <= y``)."""
    total = ExactValue()
    for c, a, b in u.monomials():
        total = total + _triangle_monomial(a, b, u.k) * c
    return total


def _triangle_monomial(a: int, b: int, k: int) -> ExactValue:
    if k == 0:
        return ExactValue(Fraction(1, (a + 1) * (a + b + 2)))
    if k > 1 and a + b <= k - 2:
        raise DivergentIntegralError(
            f"monomial x^{a} y^{b} / (x+y)^{k} is not integrable near the origin"
        )
    return i_rec(a, b, k)


def integrate_square(u: XYRational) -> ExactValue:
    """Exact ``int_0^1 int_0^1 u dx dy``.

    The square is split along the diagonal; the upper triangle is the lower
    one with ``x`` and ``y`` swapped, so each monomial ``x^a y^b`` contributes
    ``I(a, b; k) + I(b, a; k)``.
    """
    for _, a, b in u.monomials():
        if u.k > 1 and a + b < u.k - 1:
            raise DivergentIntegralError(
                f"integrand has unbounded monomial x^{a} y^{b} / (x+y)^{u.k}"
            )
    total = ExactValue()
    for c, a, b in u.monomials():
        if u.k == 0:
            term = ExactValue(Fraction(1, (a + 1) * (b + 1)))
        else:
            term = i_rec(a, b, u.k) + i_rec(b, a, u.k)
        total = total + term * c
    return total


def source_moment_integrand(p: int, q: int) -> XYRational:
    """``x^p y^q f`` as an :class:`XYRational`, for the quadrature oracle."""
    return F_SOURCE * XYRational.poly({(p, q): 1})

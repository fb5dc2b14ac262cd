from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spheremass.mass import eigenvalue
from spheremass.verify import legendre_xy
from spheremass.xyfunc import (
    F_SOURCE,
    G_MINUS_2,
    ONE,
    BiPoly,
    X,
    XYRational,
    Y,
    box_xy,
    d_dx,
    d_dy,
    evaluate,
)

F = Fraction

small = st.fractions(min_value=-5, max_value=5, max_denominator=7)
monomials = st.tuples(st.integers(0, 3), st.integers(0, 3))
polys = st.dictionaries(monomials, small, max_size=5).map(BiPoly)
xyrats = st.builds(XYRational, polys, st.integers(0, 3))
points = st.tuples(
    st.fractions(min_value=F(1, 10), max_value=1, max_denominator=50),
    st.fractions(min_value=F(1, 10), max_value=1, max_denominator=50),
)


def test_d_dx_polynomial():
    u = XYRational.poly({(2, 1): 1})
    assert d_dx(u) == XYRational.poly({(1, 1): 2})


def test_d_dx_power():
    assert d_dx(XYRational(1, 1)) == XYRational(-1, 2)


def test_d_dx_quotient():
    u = XYRational(BiPoly({(1, 1): 1}), 2)
    want = XYRational(BiPoly({(0, 2): 1, (1, 1): -1}), 3)
    assert d_dx(u) == want
    assert evaluate(d_dx(u), F(1, 2), F(1, 3)) == evaluate(want, F(1, 2), F(1, 3))


def test_box_constant():
    assert box_xy(ONE) == XYRational(4)


def test_box_green_is_source():
    f = box_xy(G_MINUS_2)
    assert f == F_SOURCE
    assert f.k == 5


def test_box_p1():
    p1 = XYRational.poly({(0, 0): 1, (1, 0): -2})
    assert box_xy(p1) == p1 * 16


@pytest.mark.parametrize("j", range(11))
@pytest.mark.parametrize("k", [0, 3, 7, 10])
def test_eigenfunctions(j, k):
    phi = legendre_xy(j, "x") * legendre_xy(k, "y")
    assert box_xy(phi) == phi * eigenvalue(j, k)


def test_corner_values():
    assert evaluate(G_MINUS_2, 1, 1) == F(13, 72)
    assert evaluate(G_MINUS_2, 1, 0) == F(1, 4)
    assert evaluate(F_SOURCE, 1, 1) == F(1, 18)


def test_pole():
    with pytest.raises(ValueError):
        evaluate(G_MINUS_2, 0, 0)
    assert evaluate(XYRational.poly({(1, 0): 1}), 0, 0) == 0


def test_canonical_cancels_factor():
    # (x + y)^2 / (x + y)^3 == 1 / (x + y)
    u = XYRational(BiPoly({(2, 0): 1, (1, 1): 2, (0, 2): 1}), 3)
    assert u.k == 1 and u == XYRational(1, 1)


def test_negative_power_is_polynomial():
    assert XYRational(1, -2) == (X + Y) ** 2


def test_immutable():
    with pytest.raises(AttributeError):
        G_MINUS_2.k = 0


@settings(max_examples=60, deadline=None)
@given(xyrats)
def test_mixed_partials_commute(u):
    assert d_dx(d_dy(u)) == d_dy(d_dx(u))


@settings(max_examples=40, deadline=None)
@given(xyrats, xyrats, small)
def test_box_linear(u, v, c):
    assert box_xy(u * c + v) == box_xy(u) * c + box_xy(v)


@settings(max_examples=60, deadline=None)
@given(xyrats)
def test_canonical_idempotent(u):
    assert u.canonical() == u
    assert u.canonical().canonical() == u.canonical()


@settings(max_examples=60, deadline=None)
@given(xyrats, xyrats, points)
def test_arithmetic_agrees_with_evaluation(u, v, pt):
    x, y = pt
    assert evaluate(u + v, x, y) == evaluate(u, x, y) + evaluate(v, x, y)
    assert evaluate(u * v, x, y) == evaluate(u, x, y) * evaluate(v, x, y)
    assert evaluate(u - v, x, y) == evaluate(u, x, y) - evaluate(v, x, y)


@settings(max_examples=40, deadline=None)
@given(xyrats, points)
def test_derivative_matches_difference_quotient(u, pt):
    # exact secant slopes converge to the derivative; compare at two step sizes
    x, y = pt
    d = evaluate(d_dx(u), x, y)
    h = F(1, 10**8)
    secant = (evaluate(u, x + h, y) - evaluate(u, x - h, y)) / (2 * h)
    assert abs(secant - d) < F(1, 10**4) * (1 + abs(d))


def test_divmod_sum_remainder():
    q, r = BiPoly({(2, 0): 1, (0, 2): -1}).divmod_sum()  # x^2 - y^2
    assert r.is_zero() and q == BiPoly({(1, 0): 1, (0, 1): -1})
    q, r = BiPoly({(2, 0): 1, (0, 2): 1}).divmod_sum()
    assert not r.is_zero()


def test_bipoly_rejects_negative_exponent():
    with pytest.raises(ValueError):
        BiPoly({(-1, 0): 1})


def test_box_f_square_bounded():
    sq = box_xy(F_SOURCE) ** 2
    assert sq.num.min_degree() >= sq.k

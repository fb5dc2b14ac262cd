from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from spheremass.exactnum import LN2, ExactValue, eval_interval
from spheremass.integrals import (
    DivergentIntegralError,
    f_tilde,
    f_tilde_assembled,
    half_numerator,
    i5_closed,
    i_base,
    i_rec,
    integrate_square,
    integrate_triangle,
    source_moment_integrand,
    triangle_moment,
)
from spheremass.xyfunc import F_SOURCE, ONE, BiPoly, XYRational, box_xy

F = Fraction


def test_i_base_examples():
    assert i_base(0, 0) == LN2
    assert i_base(0, 5) == LN2 / 6
    assert i_base(1, 0) == ExactValue(F(1, 2), F(-1, 2))


def test_i_base_negative():
    with pytest.raises(ValueError):
        i_base(-1, 0)


@pytest.mark.parametrize("p", range(11))
@pytest.mark.parametrize("q", range(11))
def test_rec_base_consistent(p, q):
    assert i_rec(p, q, 1) == i_base(p, q)


def test_rec_known_values():
    assert i_rec(3, 1, 5) == ExactValue(F(1, 64))
    assert i_rec(2, 3, 5) == ExactValue(F(5, 384))


def test_rec_p_zero_closed_form():
    # I(0, q; n) = (1 - 2^(1-n)) / ((n-1)(q+2-n)), directly integrated
    for n in range(2, 8):
        for q in range(n - 1, n + 6):
            want = (1 - F(1, 2 ** (n - 1))) / ((n - 1) * (q + 2 - n))
            assert i_rec(0, q, n) == ExactValue(want)


def test_rec_polynomial_case_by_hand():
    # I(1, 1; 2) = int_0^1 int_0^y x y / (x+y)^2 dx dy = (ln2 - 1/2) * ... checked numerically
    v = i_rec(1, 1, 2)
    from spheremass.quadrature import quad_square

    # the triangle integral is half the square integral of the symmetric integrand
    num = quad_square(XYRational(BiPoly({(1, 1): 1}), 2), 1e-11).value / 2
    assert abs(float(eval_interval(v, 20).mid) - num) < 1e-10


@pytest.mark.parametrize("args", [(2, 1, 5), (3, 0, 5), (0, 0, 2), (1, 0, 3)])
def test_rec_divergent(args):
    with pytest.raises(DivergentIntegralError):
        i_rec(*args)


def test_rec_bad_args():
    with pytest.raises(ValueError):
        i_rec(0, 0, 0)
    with pytest.raises(ValueError):
        i_rec(-1, 3, 2)


def test_i5_known_values():
    assert i5_closed(3, 2) == ExactValue(F(1, 128))
    assert i5_closed(2, 4) == ExactValue(F(5, 576))


def test_i5_p4_q2():
    # rational part -131/576 comes with the overall 1/(p+q-3) = 1/3 factor
    v = i5_closed(4, 2)
    assert v == ExactValue(F(-131, 576), F(1, 3))
    assert v == i_rec(4, 2, 5)


@pytest.mark.parametrize("p", range(13))
@pytest.mark.parametrize("q", range(13))
def test_i5_matches_recursion(p, q):
    if p >= 4 or (p == 3 and q >= 1) or (p == 2 and q >= 2):
        assert i5_closed(p, q) == i_rec(p, q, 5)
    else:
        with pytest.raises(DivergentIntegralError):
            i5_closed(p, q)


def test_i5_edge_cases_diverge():
    # outside the printed domains the integral itself diverges
    for p, q in [(2, 1), (3, 0)]:
        with pytest.raises(DivergentIntegralError):
            i_rec(p, q, 5)


def test_f_tilde_examples():
    assert f_tilde(0, 0) == ExactValue(F(-109, 54), F(160, 54))
    assert f_tilde(1, 0) == ExactValue(F(39, 9), F(-56, 9))
    assert abs(float(eval_interval(f_tilde(0, 0), 20).mid) - 0.035250) < 1e-6
    # (39 - 56 ln2)/9 = 0.0204175..., confirmed by quadrature below
    assert abs(float(eval_interval(f_tilde(1, 0), 20).mid) - 0.0204175) < 1e-6


@pytest.mark.parametrize("p,q", [(0, 0), (1, 0), (2, 3), (5, 1)])
def test_f_tilde_quadrature_oracle(p, q):
    from spheremass.quadrature import quad_square

    num = quad_square(source_moment_integrand(p, q), 1e-11).value
    assert abs(float(eval_interval(f_tilde(p, q), 20).mid) - num) < 1e-8


@pytest.mark.parametrize("p", range(13))
def test_dual_path(p):
    for q in range(13):
        assert f_tilde(p, q) == f_tilde_assembled(p, q)
        assert f_tilde(p, q) == f_tilde(q, p)


def test_triangle_special_cases():
    for q in range(15):
        assert triangle_moment(0, q) == ExactValue(F(-109, 36 * (q + 3)), F(80, 18 * (q + 3)))
        assert triangle_moment(1, q) == ExactValue(F(733, 36 * (q + 4)), F(-88, 3 * (q + 4)))


@given(st.integers(0, 40), st.integers(0, 40))
def test_triangle_moment_closed_form(p, q):
    assert triangle_moment(p, q) == half_numerator(p) / (18 * (p + q + 3))


def test_integrate_square_basic():
    assert integrate_square(ONE) == ExactValue(F(1))
    assert integrate_square(XYRational.poly({(1, 1): 1})) == ExactValue(F(1, 4))
    assert integrate_square(F_SOURCE) == f_tilde(0, 0)


def test_integrate_square_l2():
    v = integrate_square(box_xy(F_SOURCE) ** 2)
    assert v == ExactValue(F(61547, 45045))
    assert v.is_rational()


@given(st.integers(0, 6), st.integers(0, 6))
def test_integrate_square_moments(p, q):
    assert integrate_square(source_moment_integrand(p, q)) == f_tilde(p, q)


def test_integrate_square_unbounded():
    with pytest.raises(DivergentIntegralError):
        integrate_square(XYRational(1, 2))


def test_integrate_triangle_halves_symmetric():
    u = F_SOURCE
    assert integrate_triangle(u) * 2 == integrate_square(u)


def test_integrate_square_one_over_sum():
    # int int 1/(x+y) = 2 ln 2, a k=1 integrand with a log
    assert integrate_square(XYRational(1, 1)) == LN2 * 2

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spheremass.basis import c_coeff
from spheremass.exactnum import LN2, ExactValue, RatInterval, eval_interval, exact_sum
from spheremass.integrals import f_tilde
from spheremass.mass import (
    MINUS_THIRD,
    Manifold,
    SpectralTable,
    build_spectral_table,
    check_distinct_t0,
    eigenvalue,
    error_bound,
    f_bound_sq,
    float_partial_sum,
    inner_sum,
    mass_estimate,
    partial_sum,
    envelope_certified,
    distinctness_table,
    tail_bound,
    weighted_tail_bound,
)

F = Fraction


def _direct_partial_sum(m, n):
    # oracle: term-by-term from inner sums, no integer table
    terms = [
        inner_sum(j, k) * F((2 * j + 1) * (2 * k + 1) * m.weight(j, k), eigenvalue(j, k))
        for j in range(n + 1)
        for k in range(n + 1)
    ]
    return ExactValue(m.constant_term) - exact_sum(terms) * 12


# Manifold


def test_manifold_constants():
    assert [m.constant_term for m in Manifold] == [F(2, 3), F(17, 6), F(53, 6)]
    assert [m.error_multiplier for m in Manifold] == [1, 2, 4]


@given(st.integers(0, 50), st.integers(0, 50))
def test_weights_match_sign_formulas(j, k):
    s = lambda e: (-1) ** e  # noqa: E731
    assert Manifold.S2XS2.weight(j, k) == 1
    assert Manifold.G24.weight(j, k) == 1 + s(j + k)
    assert Manifold.RP2XRP2.weight(j, k) == 1 + s(j) + s(k) + s(j + k)
    for m in Manifold:
        assert m.weight(j, k) == m.weight(k, j)


def test_parse():
    assert Manifold.parse("G24") is Manifold.G24
    with pytest.raises(ValueError):
        Manifold.parse("cp2")


# eigenvalues and inner sums


def test_eigenvalue_examples():
    assert eigenvalue(0, 0) == 4
    assert eigenvalue(1, 0) == 16
    assert eigenvalue(1, 1) == 28


def test_inner_sum_examples():
    assert inner_sum(0, 0) == ExactValue(F(-109, 54), F(160, 54))
    assert inner_sum(1, 0) == f_tilde(0, 0) - f_tilde(1, 0) * 2


@given(st.integers(0, 12), st.integers(0, 12))
@settings(max_examples=40, deadline=None)
def test_inner_sum_symmetric_and_matches_definition(j, k):
    assert inner_sum(j, k) == inner_sum(k, j)
    want = exact_sum(f_tilde(p, q) * c_coeff(j, k, p, q) for p in range(j + 1) for q in range(k + 1))
    assert inner_sum(j, k) == want


def test_table_matches_inner_sums():
    tab = build_spectral_table(9)
    for j in range(10):
        for k in range(10):
            assert tab.inner(j, k) == inner_sum(j, k)


def test_table_threads_identical():
    assert build_spectral_table(17, threads=1) == build_spectral_table(17, threads=5)


def test_table_restrict_and_roundtrip():
    big = build_spectral_table(12)
    small = big.restrict(7)
    vals = {(j, k): small.inner(j, k) for j in range(8) for k in range(8)}
    again = SpectralTable.from_inner_sums(7, vals)
    for (j, k), v in vals.items():
        assert again.inner(j, k) == v
    with pytest.raises(ValueError):
        small.restrict(8)


# partial sums


def test_s0():
    assert partial_sum(Manifold.S2XS2, 0) == ExactValue(F(121, 18), F(-160, 18))


def test_s1():
    assert partial_sum(Manifold.S2XS2, 1) == ExactValue(F(4777, 1260), F(-208, 45))


def test_s1_coefficient_identity():
    f = f_tilde
    inner = f(0, 0) * 53 - f(1, 0) * 57 - f(0, 1) * 57 + f(1, 1) * 72
    assert partial_sum(Manifold.S2XS2, 1) == ExactValue(F(2, 3)) - inner * F(12, 56)


@pytest.mark.parametrize("m", list(Manifold))
@pytest.mark.parametrize("n", [0, 1, 2, 5, 8])
def test_partial_sum_matches_direct_oracle(m, n):
    assert partial_sum(m, n) == _direct_partial_sum(m, n)


@pytest.mark.parametrize("n", [1, 4, 9])
def test_g24_weight_equivalence(n):
    # skip odd j+k and double, written out independently of Manifold.weight
    terms = [
        inner_sum(j, k) * F(2 * (2 * j + 1) * (2 * k + 1), eigenvalue(j, k))
        for j in range(n + 1)
        for k in range(n + 1)
        if (j + k) % 2 == 0
    ]
    assert partial_sum(Manifold.G24, n) == ExactValue(F(17, 6)) - exact_sum(terms) * 12


def test_s100_digits():
    s = mass_estimate(Manifold.S2XS2, 100, 12).sum_interval
    assert F("0.5872473203") <= s.lo and s.hi < F("0.5872473204")


def test_float_partial_sum_small_n():
    for m in Manifold:
        exact = float(eval_interval(partial_sum(m, 6), 20).mid)
        assert float_partial_sum(m, 6) == pytest.approx(exact, rel=1e-9)


def test_partial_sum_negative():
    with pytest.raises(ValueError):
        partial_sum(Manifold.S2XS2, -1)


# bounds


def test_f_bound_examples():
    want = F(-1, 24 * 49) + F(1, 3 * 64) + F(1, 512)
    assert f_bound_sq(1) == want
    assert abs(float(want) - 0.0063111) < 1e-7
    assert f_bound_sq(2) < f_bound_sq(1)


def test_f_bound_monotone():
    vals = [f_bound_sq(n) for n in range(1, 202)]
    assert all(a > b > 0 for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("n", [1, 2, 3, 10, 40, 100, 250, 400])
def test_envelope_certified(n):
    assert envelope_certified(n)


def test_error_bound_examples():
    eb1 = error_bound(Manifold.S2XS2, 1)
    assert F("0.09286") <= eb1 <= F("0.09287")
    assert error_bound(Manifold.S2XS2, 100) < F("0.0000209")
    for n in (1, 7, 100):
        s = error_bound(Manifold.S2XS2, n)
        assert error_bound(Manifold.G24, n) == 2 * s
        assert error_bound(Manifold.RP2XRP2, n) == 4 * s


def test_error_bound_rejects():
    with pytest.raises(ValueError):
        error_bound(Manifold.S2XS2, 0)
    with pytest.raises(ValueError):
        error_bound(Manifold.S2XS2, 3, "loose")


@pytest.mark.parametrize("n", [1, 5, 30, 100])
def test_refined_not_looser(n):
    for m in Manifold:
        assert error_bound(m, n, "refined") <= error_bound(m, n, "envelope")


@pytest.mark.parametrize("n", [1, 3, 10, 25])
def test_tail_bounds_dominate_brute_force(n):
    from spheremass import kernels

    size = 2000
    for mode, parity in [(0, None), (2, 0)]:
        brute = kernels.brute_tail(n, size, mode)
        bound = tail_bound(n, parity)
        assert float(bound) * (16 if mode == 2 else 1) >= brute
    assert float(weighted_tail_bound(Manifold.G24, n)) >= kernels.brute_tail(n, size, 1)
    assert float(weighted_tail_bound(Manifold.RP2XRP2, n)) >= kernels.brute_tail(n, size, 2)


@pytest.mark.parametrize("m", list(Manifold))
def test_successive_sums_within_bound(m):
    # the certified bound at N must cover the step to N+1
    prev = partial_sum(m, 1)
    for n in range(1, 20):
        cur = partial_sum(m, n + 1)
        diff = cur - prev
        step = eval_interval(diff, 20 + len(str(abs(diff.b.numerator // diff.b.denominator))))
        assert max(abs(step.lo), abs(step.hi)) <= error_bound(m, n)
        prev = cur


# estimates


def test_mass_estimate_n1():
    e = mass_estimate(Manifold.S2XS2, 1, 6)
    assert F("0.4940") < e.mass_interval.lo < F("0.4950")
    assert F("0.6800") < e.mass_interval.hi < F("0.6810")
    assert e.mass_interval == e.sum_interval.widen(e.error_bound)
    assert e.t0_interval.is_disjoint(MINUS_THIRD)
    assert F("-0.2247") < e.t0_interval.lo and e.t0_interval.hi < F("-0.1632")


def test_mass_estimate_rp2_n1_contains_table_value():
    e = mass_estimate(Manifold.RP2XRP2, 1)
    assert F("8.4323") in e.mass_interval


def test_mass_estimate_n100_s2():
    e = mass_estimate(Manifold.S2XS2, 100, 10)
    assert e.mass_interval.width < F("4.2e-5")
    assert F("0.58722") < e.mass_interval.lo and e.mass_interval.hi < F("0.58727")


@pytest.mark.parametrize("digits", [1, 4, 10, 25])
def test_sum_interval_width_follows_digits(digits):
    e = mass_estimate(Manifold.G24, 20, digits)
    assert e.sum_interval.width < F(1, 10 ** (digits + 1))


@pytest.mark.parametrize("n", [1, 2, 3, 6, 15])
def test_masses_positive(n):
    for m in Manifold:
        assert mass_estimate(m, n).mass_interval.lo > 0


@settings(max_examples=50, deadline=None)
@given(st.fractions(min_value=0, max_value=1))
def test_t0_is_monotone_image(u):
    e = mass_estimate(Manifold.S2XS2, 3)
    mi = e.mass_interval
    m = mi.lo + u * mi.width
    assert F(-1) / (9 * m) in e.t0_interval
    assert F(-2) / (9 * m) in e.t0_double_interval
    assert e.t0_interval.lo == F(-1) / (9 * mi.lo)
    assert e.t0_interval.hi == F(-1) / (9 * mi.hi)


def test_mass_estimate_rejects():
    with pytest.raises(ValueError):
        mass_estimate(Manifold.S2XS2, 0)
    with pytest.raises(ValueError):
        mass_estimate(Manifold.S2XS2, 3, 0)


def test_check_distinct_t0():
    e = mass_estimate(Manifold.S2XS2, 1)
    a = RatInterval(F(-1), F(0))
    assert check_distinct_t0([(e.t0_interval, MINUS_THIRD), (a, a)]) == [True, False]


def test_distinctness_at_n1_first_row_proven():
    rows = distinctness_table({m: mass_estimate(m, 1) for m in Manifold})
    assert len(rows) == 6
    assert rows[0].topology == "S2xS2 # CP2bar" and rows[0].verdict == "proven"
    for r in rows:
        assert r.verdict in ("proven", "undecided at this N")


def test_distinctness_subset():
    rows = distinctness_table({Manifold.S2XS2: mass_estimate(Manifold.S2XS2, 1)})
    assert [r.topology for r in rows] == ["S2xS2 # CP2bar"]


def test_double_t0_distinct_large_n():
    ests = {m: mass_estimate(m, 40) for m in (Manifold.S2XS2, Manifold.G24)}
    assert ests[Manifold.S2XS2].t0_double_interval.is_disjoint(ests[Manifold.G24].t0_double_interval)


def test_ln2_is_exact_value():
    assert isinstance(LN2, ExactValue)

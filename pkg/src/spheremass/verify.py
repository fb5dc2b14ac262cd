"""Oracle suites behind ``spheremass verify``.

Each suite is a list of named checks.  Exact suites compare canonical forms;
the quadrature suite compares against floating-point integration.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from . import kernels
from .basis import alt_harmonic, binomial, c_coeff, shifted_legendre
from .exactnum import LN2, ExactValue, eval_interval
from .integrals import (
    DivergentIntegralError,
    f_tilde,
    f_tilde_assembled,
    i5_closed,
    i_base,
    i_rec,
    integrate_square,
    source_moment_integrand,
    triangle_moment,
)
from .mass import (
    BOX_F_L2,
    Manifold,
    eigenvalue,
    error_bound,
    f_bound_sq,
    envelope_certified,
    partial_sum,
    tail_bound,
    weighted_tail_bound,
)
from .quadrature import quad_square
from .xyfunc import F_SOURCE, G_MINUS_2, ONE, BiPoly, XYRational, box_xy, d_dx, d_dy, evaluate

__all__ = ["Check", "SUITES", "run_suite", "run_suites", "legendre_xy"]


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    passed: bool
    detail: str = ""


def legendre_xy(j: int, var: str = "x") -> XYRational:
    """``P_j(1 - 2x)`` (or ``P_j(1 - 2y)``) as a polynomial."""
    coeffs = shifted_legendre(j).coeffs
    if var == "x":
        return XYRational.poly({(p, 0): c for p, c in enumerate(coeffs)})
    return XYRational.poly({(0, p): c for p, c in enumerate(coeffs)})


def _poly_integral_01(coeffs) -> Fraction:
    return sum((Fraction(c, i + 1) for i, c in enumerate(coeffs)), Fraction(0))


def _poly_mul(a, b) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


# --------------------------------------------------------------------------


def suite_symbolic(**_) -> list[Check]:
    out = []
    f = box_xy(G_MINUS_2)
    out.append(Check("symbolic", "box G_-2 == f", f == F_SOURCE, f"k={f.k}"))
    out.append(Check("symbolic", "box 1 == 4", box_xy(ONE) == XYRational(4)))
    p1 = legendre_xy(1)
    out.append(Check("symbolic", "box (1-2x) == 16 (1-2x)", box_xy(p1) == p1 * 16))
    for name, fn, pt, want in [
        ("G_-2(1,1) == 13/72", G_MINUS_2, (1, 1), Fraction(13, 72)),
        ("G_-2(1,0) == 1/4", G_MINUS_2, (1, 0), Fraction(1, 4)),
        ("f(1,1) == 1/18", F_SOURCE, (1, 1), Fraction(1, 18)),
    ]:
        got = evaluate(fn, *pt)
        out.append(Check("symbolic", name, got == want, str(got)))
    u = G_MINUS_2 * XYRational.poly({(1, 2): 3, (0, 1): -1}) + F_SOURCE
    out.append(Check("symbolic", "mixed partials commute", d_dx(d_dy(u)) == d_dy(d_dx(u))))
    sq = box_xy(F_SOURCE)
    out.append(
        Check(
            "symbolic",
            "box f is bounded on the square",
            sq.num.min_degree() >= sq.k,
            f"num degrees {sq.num.min_degree()}..{sq.num.degree()}, k={sq.k}",
        )
    )
    return out


def suite_eigen(*, max_degree: int = 10, **_) -> list[Check]:
    bad = []
    for j in range(max_degree + 1):
        pj = legendre_xy(j, "x")
        for k in range(max_degree + 1):
            phi = pj * legendre_xy(k, "y")
            if box_xy(phi) != phi * eigenvalue(j, k):
                bad.append((j, k))
    return [
        Check(
            "eigen",
            f"box P_j P_k == lambda P_j P_k for j,k <= {max_degree}",
            not bad,
            f"failures: {bad}" if bad else f"{(max_degree + 1) ** 2} pairs",
        )
    ]


def suite_legendre(**_) -> list[Check]:
    out = []
    ends = all(
        shifted_legendre(j)(0) == 1 and shifted_legendre(j)(1) == (-1) ** j for j in range(51)
    )
    out.append(Check("legendre", "P_j(1) = 1, P_j(-1) = (-1)^j for j <= 50", ends))
    bad = []
    for j in range(16):
        for k in range(j, 16):
            prod = _poly_mul(shifted_legendre(j).coeffs, shifted_legendre(k).coeffs)
            want = Fraction(1, 2 * j + 1) if j == k else 0
            if _poly_integral_01(prod) != want:
                bad.append((j, k))
    out.append(Check("legendre", "orthogonality on [0,1] for j,k <= 15", not bad, str(bad or "")))
    ode = all(box_xy(legendre_xy(j)) == legendre_xy(j) * (6 * j * (j + 1) + 4) for j in range(16))
    out.append(Check("legendre", "Legendre ODE in x-form for j <= 15", ode))
    sym = all(
        c_coeff(j, k, p, q) == c_coeff(k, j, q, p)
        for j in range(7)
        for k in range(7)
        for p in range(j + 1)
        for q in range(k + 1)
    )
    out.append(Check("legendre", "c(j,k,p,q) == c(k,j,q,p)", sym))
    pascal = all(
        binomial(n, r) == binomial(n - 1, r - 1) + binomial(n - 1, r)
        for n in range(1, 60)
        for r in range(1, n)
    )
    out.append(Check("legendre", "binomial Pascal rule", pascal))
    return out


def suite_closedform(**_) -> list[Check]:
    out = []
    base = all(i_rec(p, q, 1) == i_base(p, q) for p in range(11) for q in range(11))
    out.append(Check("closedform", "I_rec(p,q,1) == I_base(p,q), p,q <= 10", base))
    dom = [
        (p, q)
        for p in range(13)
        for q in range(13)
        if p >= 4 or (p == 3 and q >= 1) or (p == 2 and q >= 2)
    ]
    bad = [(p, q) for p, q in dom if i5_closed(p, q) != i_rec(p, q, 5)]
    out.append(
        Check("closedform", "I5 closed forms == recursion, p,q <= 12", not bad, f"{len(dom)} cases")
    )
    for args, want in [
        ((3, 1), Fraction(1, 64)),
        ((2, 3), Fraction(5, 384)),
        ((3, 2), Fraction(1, 128)),
        ((2, 4), Fraction(5, 576)),
    ]:
        got = i_rec(*args, 5)
        out.append(Check("closedform", f"I{args + (5,)} == {want}", got == ExactValue(want), str(got)))
    rejected = 0
    for p, q in [(2, 1), (3, 0), (2, 0), (1, 1)]:
        try:
            i_rec(p, q, 5)
        except DivergentIntegralError:
            rejected += 1
    out.append(Check("closedform", "divergent I(.,.;5) edge cases rejected", rejected == 4))
    p0 = all(
        triangle_moment(0, q) == ExactValue(Fraction(-109, 36 * (q + 3)), Fraction(80, 18 * (q + 3)))
        for q in range(13)
    )
    p1 = all(
        triangle_moment(1, q) == ExactValue(Fraction(733, 36 * (q + 4)), Fraction(-88, 3 * (q + 4)))
        for q in range(13)
    )
    out.append(Check("closedform", "p = 0 triangle moment", p0))
    out.append(Check("closedform", "p = 1 triangle moment", p1))
    return out


def suite_dualpath(**_) -> list[Check]:
    bad = [(p, q) for p in range(13) for q in range(13) if f_tilde(p, q) != f_tilde_assembled(p, q)]
    out = [Check("dualpath", "f~ closed form == assembled, p,q <= 12", not bad, str(bad or ""))]
    out.append(
        Check(
            "dualpath",
            "f~(0,0) == (-109 + 160 ln2)/54",
            f_tilde(0, 0) == ExactValue(Fraction(-109, 54), Fraction(160, 54)),
        )
    )
    out.append(
        Check(
            "dualpath",
            "f~(1,0) == (39 - 56 ln2)/9",
            f_tilde(1, 0) == ExactValue(Fraction(39, 9), Fraction(-56, 9)),
        )
    )
    out.append(
        Check("dualpath", "integrate_square(f) == f~(0,0)", integrate_square(F_SOURCE) == f_tilde(0, 0))
    )
    return out


def suite_l2norm(**_) -> list[Check]:
    got = integrate_square(box_xy(F_SOURCE) ** 2)
    return [
        Check(
            "l2norm",
            "int int (box f)^2 == 61547/45045",
            got == ExactValue(BOX_F_L2),
            str(got),
        )
    ]


def suite_quadrature(*, tol: float = 1e-6, **_) -> list[Check]:
    qtol = max(tol * 1e-2, 1e-12)
    worst, where = 0.0, None
    for p in range(7):
        for q in range(7):
            exact = eval_interval(f_tilde(p, q), 20).mid
            res = quad_square(source_moment_integrand(p, q), qtol)
            err = abs(res.value - float(exact))
            if err > worst:
                worst, where = err, (p, q)
    out = [
        Check(
            "quadrature",
            f"quad(x^p y^q f) vs f~ for p,q <= 6 within {tol:g}",
            worst <= tol,
            f"worst {worst:.2e} at {where} [{kernels.BACKEND}]",
        )
    ]
    l2tol = max(tol, 1e-5)
    res = quad_square(box_xy(F_SOURCE) ** 2, min(l2tol * 1e-2, 1e-7))
    err = abs(res.value - float(BOX_F_L2))
    out.append(Check("quadrature", f"quad((box f)^2) vs 61547/45045 within {l2tol:g}", err <= l2tol, f"{err:.2e}"))
    return out


def suite_tail(**_) -> list[Check]:
    out = []
    cert = [n for n in range(1, 401) if not envelope_certified(n)]
    out.append(Check("tail", "F(N)^2/144 dominates the tail bound for N <= 400", not cert, str(cert or "")))
    mono = all(f_bound_sq(n + 1) < f_bound_sq(n) for n in range(1, 201))
    out.append(Check("tail", "F(N)^2 decreasing for N <= 200", mono))
    # brute-force partial tails are lower bounds of the true tails
    bad = []
    for n in (1, 2, 5, 10, 40):
        size = 40 * (n + 1)
        for mode, bound in [
            (0, tail_bound(n)),
            (1, weighted_tail_bound(Manifold.G24, n)),
            (2, weighted_tail_bound(Manifold.RP2XRP2, n)),
        ]:
            if kernels.brute_tail(n, size, mode) > float(bound):
                bad.append((n, mode))
    out.append(Check("tail", "truncated brute-force tails below analytic bounds", not bad, str(bad or "")))
    return out


def suite_series(**_) -> list[Check]:
    out = []
    s1 = partial_sum(Manifold.S2XS2, 1)
    out.append(
        Check("series", "S_1 == 4777/1260 - 208/45 ln2", s1 == ExactValue(Fraction(4777, 1260), Fraction(-208, 45)))
    )
    ft = f_tilde
    expand = Fraction(2, 3) - (53 * ft(0, 0) - 57 * ft(1, 0) - 57 * ft(0, 1) + 72 * ft(1, 1)) * Fraction(12, 56)
    out.append(Check("series", "S_1 coefficient identity", s1 == expand))
    s0 = partial_sum(Manifold.S2XS2, 0)
    out.append(Check("series", "S_0 == (121 - 160 ln2)/18", s0 == ExactValue(Fraction(121, 18), Fraction(-160, 18))))
    bad = []
    for m in Manifold:
        prev = partial_sum(m, 1)
        for n in range(1, 16):
            nxt = partial_sum(m, n + 1)
            diff = eval_interval(nxt - prev, 30)
            if max(abs(diff.lo), abs(diff.hi)) > error_bound(m, n):
                bad.append((m.value, n))
            prev = nxt
    out.append(Check("series", "|S_(N+1) - S_N| <= bound(N), N <= 15", not bad, str(bad or "")))
    return out


SUITES: dict[str, Callable[..., list[Check]]] = {
    "symbolic": suite_symbolic,
    "eigen": suite_eigen,
    "legendre": suite_legendre,
    "closedform": suite_closedform,
    "dualpath": suite_dualpath,
    "l2norm": suite_l2norm,
    "quadrature": suite_quadrature,
    "tail": suite_tail,
    "series": suite_series,
}


def run_suite(name: str, **opts) -> tuple[list[Check], float]:
    try:
        fn = SUITES[name]
    except KeyError:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}") from None
    t0 = time.perf_counter()
    checks = fn(**opts)
    return checks, time.perf_counter() - t0


def run_suites(names=None, **opts) -> list[tuple[str, list[Check], float]]:
    return [(n, *run_suite(n, **opts)) for n in (names or list(SUITES))]
